#include "idiomizer/idioms.hpp"

#include <json.hpp>

namespace idiomizer {

std::string_view idiom_name(IdiomKind kind) {
    switch (kind) {
        case IdiomKind::ListComprehension: return "list-comprehension";
        case IdiomKind::SetComprehension: return "set-comprehension";
        case IdiomKind::DictComprehension: return "dict-comprehension";
        case IdiomKind::ChainComparison: return "chain-comparison";
        case IdiomKind::TruthTest: return "truth-test";
        case IdiomKind::LoopElse: return "loop-else";
        case IdiomKind::AssignMultiTargets: return "assign-multi-targets";
        case IdiomKind::ForMultiTargets: return "for-multi-targets";
        case IdiomKind::StarInFuncCall: return "star-in-func-call";
        case IdiomKind::With: return "with";
        case IdiomKind::Enumerate: return "enumerate";
        case IdiomKind::ChainAssignSameValue: return "chain-assign-same-value";
        case IdiomKind::Fstring: return "fstring";
    }
    return "unknown";
}

std::optional<IdiomKind> idiom_from_name(std::string_view name) {
    for (IdiomKind k : kAllIdioms) {
        if (idiom_name(k) == name) return k;
    }
    return std::nullopt;
}

const ConditionInfo& condition_info(ConditionId id) {
    static const std::vector<ConditionInfo> infos = {
        {ConditionId::ForHasAppendCall, "for-has-append-call",
         "the For node has an \"append\" function call", false},
        {ConditionId::ForHasAddCall, "for-has-add-call",
         "the For node has an \"add\" function call", false},
        {ConditionId::CallReceiverIsInitTarget, "call-receiver-is-init-target",
         "the receiver of the append/add call is the assigned variable of the Assign node",
         false},
        {ConditionId::InitAssignsEmptyCollection, "init-assigns-empty-collection",
         "the Assign node binds the target to an empty collection literal immediately before "
         "the loop",
         true},
        {ConditionId::BodyReducesToSingleEffect, "body-reduces-to-single-effect",
         "after guard normalization the loop body reduces to the single collecting statement",
         true},
        {ConditionId::ForHasSubscriptAssign, "for-has-subscript-assign",
         "the For node has an assign statement whose assigned variable is a Subscript node",
         false},
        {ConditionId::SubscriptBaseIsInitTarget, "subscript-base-is-init-target",
         "the value of the Subscript node is the assigned variable of the Assign node", false},
        {ConditionId::CompareOperandsIntersect, "compare-operands-intersect",
         "compare operands of the two Compare nodes intersect", false},
        {ConditionId::CompareOpIsEqOrNotEq, "compare-op-is-eq-or-noteq",
         "the op of the Compare node is \"==\" or \"!=\"", false},
        {ConditionId::OneOperandIsEmptySetLiteral, "one-operand-is-emptyset-literal",
         "exactly one comparison operand belongs to EmptySet "
         "(0, 0.0, \"\", b\"\", [], {}, (), False)",
         false},
        {ConditionId::LoopHasBreak, "loop-has-break",
         "the For/While node has break statements", false},
        {ConditionId::IfIsNextStatementOfLoop, "if-is-next-statement-of-loop",
         "the If node is the next statement of the For/While node", false},
        {ConditionId::IfTestNegatesUniqueBreakGuard, "if-test-negates-unique-break-guard",
         "the If test is the syntactic negation of the loop's unique break guard", true},
        {ConditionId::NoDanglingElse, "no-dangling-else",
         "neither the loop nor the trailing If carries an else clause", true},
        {ConditionId::NoCrossDependency, "no-cross-dependency",
         "no merged right-hand side references an earlier merged target", true},
        {ConditionId::AllSingleTargetSimpleAssigns, "all-single-target-simple-assigns",
         "every statement in the run is a single-target simple assignment", true},
        {ConditionId::AssignValuesAllSame, "assign-values-all-same",
         "the values of consecutive Assign nodes are the same", false},
        {ConditionId::SharedValueIsImmutableLiteral, "shared-value-is-immutable-literal",
         "the shared value is an immutable literal (None, True, False, number, string)", true},
        {ConditionId::BodyHasSubscript, "body-has-subscript",
         "the body of the For node has a Subscript node", false},
        {ConditionId::SubscriptValueIsLoopVariable, "subscript-value-is-loop-variable",
         "the value of the Subscript node is the iterated variable of the For node", false},
        {ConditionId::IndicesAreNonNegativeIntLiterals, "indices-are-non-negative-int-literals",
         "subscript indices on the loop variable are non-negative integer literals", true},
        {ConditionId::LoopVarUsedOnlySubscripted, "loop-var-used-only-subscripted",
         "every use of the loop variable in the body is a subscript access", true},
        {ConditionId::SubscriptValuesSame, "subscript-values-same",
         "the values of the Subscript nodes are the same", false},
        {ConditionId::StarIndicesValid, "star-indices-valid",
         "indices form a step-1 ascending run over a common base with no crossing from "
         "negative to non-negative",
         true},
        {ConditionId::CalleeNameIsOpen, "callee-name-is-open",
         "the function name of the Call node is \"open\"", false},
        {ConditionId::OpenCallConsumedInSimpleStatement, "open-call-consumed-in-simple-statement",
         "the open(...) result is consumed entirely within one simple statement and is not "
         "stored, returned, or already a with context expression",
         true},
        {ConditionId::IterNotEnumerateCall, "iter-not-enumerate-call",
         "the iterated object is not a function call whose function name is \"enumerate\"",
         false},
        {ConditionId::IterIsRangeLen, "iter-is-range-len",
         "the iterated expression is range(len(X)) for a name or attribute X", true},
        {ConditionId::BodySubscriptsIteratedObject, "body-subscripts-iterated-object",
         "X[i] appears in the loop body for the iterated object X and index variable i", true},
        {ConditionId::BinOpIsPercent, "binop-is-percent",
         "the op of the BinOp node is \"%\"", false},
        {ConditionId::LeftOperandIsPlainStringLiteral, "left-operand-is-plain-string-literal",
         "the left operand is a plain (or raw/unicode) string literal, not bytes or f-string",
         true},
    };
    for (const ConditionInfo& info : infos) {
        if (info.id == id) return info;
    }
    return infos.front();
}

namespace {

std::vector<IdiomSpec> make_catalog() {
    std::vector<IdiomSpec> specs;
    specs.push_back({IdiomKind::ListComprehension,
                     std::nullopt,
                     NodePair{NodeKind::For, NodeKind::Other, NodeKind::Assign,
                              NodePair::Adjacency::InitBeforeLoop},
                     {ConditionId::ForHasAppendCall, ConditionId::CallReceiverIsInitTarget,
                      ConditionId::InitAssignsEmptyCollection,
                      ConditionId::BodyReducesToSingleEffect},
                     AbstractionMode::NoAbstraction});
    specs.push_back({IdiomKind::SetComprehension,
                     std::nullopt,
                     NodePair{NodeKind::For, NodeKind::Other, NodeKind::Assign,
                              NodePair::Adjacency::InitBeforeLoop},
                     {ConditionId::ForHasAddCall, ConditionId::CallReceiverIsInitTarget,
                      ConditionId::InitAssignsEmptyCollection,
                      ConditionId::BodyReducesToSingleEffect},
                     AbstractionMode::NoAbstraction});
    specs.push_back({IdiomKind::DictComprehension,
                     std::nullopt,
                     NodePair{NodeKind::For, NodeKind::Other, NodeKind::Assign,
                              NodePair::Adjacency::InitBeforeLoop},
                     {ConditionId::ForHasSubscriptAssign, ConditionId::SubscriptBaseIsInitTarget,
                      ConditionId::InitAssignsEmptyCollection,
                      ConditionId::BodyReducesToSingleEffect},
                     AbstractionMode::NoAbstraction});
    specs.push_back({IdiomKind::ChainComparison,
                     ScenarioPattern{ScenarioPattern::Which::AndBoolOp,
                                     "a BoolOp node whose op is \"and\""},
                     NodePair{NodeKind::Compare, NodeKind::Other, NodeKind::Compare,
                              NodePair::Adjacency::WithinScenario},
                     {ConditionId::CompareOperandsIntersect},
                     AbstractionMode::OperandMapping});
    specs.push_back({IdiomKind::TruthTest,
                     ScenarioPattern{ScenarioPattern::Which::TestPosition, "a test-type node"},
                     SingleNode{NodeKind::Compare},
                     {ConditionId::CompareOpIsEqOrNotEq, ConditionId::OneOperandIsEmptySetLiteral},
                     AbstractionMode::NoAbstraction});
    specs.push_back({IdiomKind::LoopElse,
                     std::nullopt,
                     NodePair{NodeKind::For, NodeKind::While, NodeKind::If,
                              NodePair::Adjacency::NextStatement},
                     {ConditionId::LoopHasBreak, ConditionId::IfIsNextStatementOfLoop,
                      ConditionId::IfTestNegatesUniqueBreakGuard, ConditionId::NoDanglingElse},
                     AbstractionMode::NoAbstraction});
    specs.push_back({IdiomKind::AssignMultiTargets,
                     std::nullopt,
                     ConsecutiveRun{NodeKind::Assign, 2},
                     {ConditionId::NoCrossDependency, ConditionId::AllSingleTargetSimpleAssigns},
                     AbstractionMode::NoAbstraction});
    specs.push_back({IdiomKind::ForMultiTargets,
                     std::nullopt,
                     SingleNode{NodeKind::For},
                     {ConditionId::BodyHasSubscript, ConditionId::SubscriptValueIsLoopVariable,
                      ConditionId::IndicesAreNonNegativeIntLiterals,
                      ConditionId::LoopVarUsedOnlySubscripted},
                     AbstractionMode::SpecifiedObject});
    specs.push_back({IdiomKind::StarInFuncCall,
                     ScenarioPattern{ScenarioPattern::Which::CallNode, "a Call node"},
                     ConsecutiveRun{NodeKind::Subscript, 2},
                     {ConditionId::SubscriptValuesSame, ConditionId::StarIndicesValid},
                     AbstractionMode::SpecifiedObject});
    specs.push_back({IdiomKind::With,
                     std::nullopt,
                     SingleNode{NodeKind::Call},
                     {ConditionId::CalleeNameIsOpen,
                      ConditionId::OpenCallConsumedInSimpleStatement},
                     AbstractionMode::NoAbstraction});
    specs.push_back({IdiomKind::Enumerate,
                     std::nullopt,
                     SingleNode{NodeKind::For},
                     {ConditionId::IterNotEnumerateCall, ConditionId::IterIsRangeLen,
                      ConditionId::BodySubscriptsIteratedObject},
                     AbstractionMode::SpecifiedObject});
    specs.push_back({IdiomKind::ChainAssignSameValue,
                     std::nullopt,
                     ConsecutiveRun{NodeKind::Assign, 2},
                     {ConditionId::AssignValuesAllSame, ConditionId::SharedValueIsImmutableLiteral,
                      ConditionId::AllSingleTargetSimpleAssigns},
                     AbstractionMode::NoAbstraction});
    specs.push_back({IdiomKind::Fstring,
                     std::nullopt,
                     SingleNode{NodeKind::BinOp},
                     {ConditionId::BinOpIsPercent, ConditionId::LeftOperandIsPlainStringLiteral},
                     AbstractionMode::NoAbstraction});
    return specs;
}

}  // namespace

const std::vector<IdiomSpec>& catalog() {
    static const std::vector<IdiomSpec> specs = make_catalog();
    return specs;
}

const IdiomSpec& spec_for(IdiomKind kind) {
    for (const IdiomSpec& spec : catalog()) {
        if (spec.kind == kind) return spec;
    }
    return catalog().front();
}

std::string catalog_json() {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const IdiomSpec& spec : catalog()) {
        nlohmann::ordered_json entry;
        entry["kind"] = std::string(idiom_name(spec.kind));
        if (spec.scenario) {
            entry["scenario"] = std::string(spec.scenario->description);
        } else {
            entry["scenario"] = nullptr;
        }
        nlohmann::ordered_json comp;
        if (const auto* single = std::get_if<SingleNode>(&spec.component)) {
            comp["shape"] = "single-node";
            comp["node"] = std::string(node_kind_name(single->kind));
        } else if (const auto* pair = std::get_if<NodePair>(&spec.component)) {
            comp["shape"] = "node-pair";
            std::string first(node_kind_name(pair->first));
            if (pair->first_alt != NodeKind::Other) {
                first += "/";
                first += node_kind_name(pair->first_alt);
            }
            comp["first"] = first;
            comp["second"] = std::string(node_kind_name(pair->second));
            switch (pair->rule) {
                case NodePair::Adjacency::InitBeforeLoop: comp["adjacency"] = "init-before-loop"; break;
                case NodePair::Adjacency::NextStatement: comp["adjacency"] = "next-statement"; break;
                case NodePair::Adjacency::WithinScenario: comp["adjacency"] = "within-scenario"; break;
            }
        } else if (const auto* run = std::get_if<ConsecutiveRun>(&spec.component)) {
            comp["shape"] = "consecutive-run";
            comp["node"] = std::string(node_kind_name(run->kind));
            comp["min_len"] = run->min_len;
        }
        entry["component"] = comp;
        nlohmann::ordered_json conds = nlohmann::ordered_json::array();
        for (ConditionId id : spec.conditions) {
            const ConditionInfo& info = condition_info(id);
            conds.push_back({{"name", std::string(info.name)},
                             {"description", std::string(info.description)},
                             {"origin", info.artifact_added ? "artifact" : "table"}});
        }
        entry["conditions"] = conds;
        doc.push_back(entry);
    }
    return doc.dump(2) + "\n";
}

}  // namespace idiomizer
