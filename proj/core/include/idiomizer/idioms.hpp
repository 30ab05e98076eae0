#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "idiomizer/ast.hpp"

namespace idiomizer {

enum class IdiomKind {
    ListComprehension,
    SetComprehension,
    DictComprehension,
    ChainComparison,
    TruthTest,
    LoopElse,
    AssignMultiTargets,
    ForMultiTargets,
    StarInFuncCall,
    With,
    Enumerate,
    ChainAssignSameValue,
    Fstring,
};

inline constexpr std::array<IdiomKind, 13> kAllIdioms = {
    IdiomKind::ListComprehension, IdiomKind::SetComprehension, IdiomKind::DictComprehension,
    IdiomKind::ChainComparison,   IdiomKind::TruthTest,        IdiomKind::LoopElse,
    IdiomKind::AssignMultiTargets, IdiomKind::ForMultiTargets, IdiomKind::StarInFuncCall,
    IdiomKind::With,              IdiomKind::Enumerate,        IdiomKind::ChainAssignSameValue,
    IdiomKind::Fstring,
};

std::string_view idiom_name(IdiomKind kind);
std::optional<IdiomKind> idiom_from_name(std::string_view name);

/// Usage-scenario restriction: present for chain-comparison (BoolOp whose op
/// is "and"), truth-test (a test-position node) and star-in-func-call (a Call
/// node); absent for the other ten.
struct ScenarioPattern {
    enum class Which { AndBoolOp, TestPosition, CallNode } which;
    std::string_view description;
};

struct SingleNode {
    NodeKind kind;
};
struct NodePair {
    NodeKind first;
    NodeKind first_alt;  // Other when unused (For/While alternative for loop-else)
    NodeKind second;
    enum class Adjacency { InitBeforeLoop, NextStatement, WithinScenario } rule;
};
struct ConsecutiveRun {
    NodeKind kind;
    int min_len = 2;
};
using ComponentShape = std::variant<SingleNode, NodePair, ConsecutiveRun>;

enum class ConditionId {
    // list/set-comprehension (shared table row, split specs)
    ForHasAppendCall,
    ForHasAddCall,
    CallReceiverIsInitTarget,
    InitAssignsEmptyCollection,
    BodyReducesToSingleEffect,
    // dict-comprehension
    ForHasSubscriptAssign,
    SubscriptBaseIsInitTarget,
    // chain-comparison
    CompareOperandsIntersect,
    // truth-test
    CompareOpIsEqOrNotEq,
    OneOperandIsEmptySetLiteral,
    // loop-else
    LoopHasBreak,
    IfIsNextStatementOfLoop,
    IfTestNegatesUniqueBreakGuard,
    NoDanglingElse,
    // assign-multi-targets / chain-assign-same-value
    NoCrossDependency,
    AllSingleTargetSimpleAssigns,
    AssignValuesAllSame,
    SharedValueIsImmutableLiteral,
    // for-multi-targets
    BodyHasSubscript,
    SubscriptValueIsLoopVariable,
    IndicesAreNonNegativeIntLiterals,
    LoopVarUsedOnlySubscripted,
    // star-in-func-call
    SubscriptValuesSame,
    StarIndicesValid,
    // with
    CalleeNameIsOpen,
    OpenCallConsumedInSimpleStatement,
    // enumerate
    IterNotEnumerateCall,
    IterIsRangeLen,
    BodySubscriptsIteratedObject,
    // fstring
    BinOpIsPercent,
    LeftOperandIsPlainStringLiteral,
};

struct ConditionInfo {
    ConditionId id;
    std::string_view name;         // stable machine name
    std::string_view description;  // human-readable
    bool artifact_added;           // false: straight from the knowledge table
};
const ConditionInfo& condition_info(ConditionId id);

enum class AbstractionMode { SpecifiedObject, OperandMapping, NoAbstraction };

struct IdiomSpec {
    IdiomKind kind;
    std::optional<ScenarioPattern> scenario;
    ComponentShape component;
    std::vector<ConditionId> conditions;
    AbstractionMode abstraction;
};

/// The 13 specs in knowledge-table row order (list/set split share a row).
/// Built once; immutable.
const std::vector<IdiomSpec>& catalog();
const IdiomSpec& spec_for(IdiomKind kind);

/// JSON document for `idiomizer idioms --json`: array of
/// {kind, scenario, component, conditions[{name, description, origin}]}.
std::string catalog_json();

}  // namespace idiomizer
