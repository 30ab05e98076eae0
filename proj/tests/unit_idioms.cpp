#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "idiomizer/idioms.hpp"

using namespace idiomizer;

TEST_CASE("catalog covers all thirteen idioms in table order") {
    const auto& specs = catalog();
    REQUIRE(specs.size() == 13);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        CHECK(specs[i].kind == kAllIdioms[i]);
        CHECK(&spec_for(specs[i].kind) == &specs[i]);
    }
}

TEST_CASE("scenario column: present for exactly three idioms") {
    for (const IdiomSpec& spec : catalog()) {
        const bool has = spec.scenario.has_value();
        const bool expected = spec.kind == IdiomKind::ChainComparison ||
                              spec.kind == IdiomKind::TruthTest ||
                              spec.kind == IdiomKind::StarInFuncCall;
        CHECK(has == expected);
    }
    CHECK(spec_for(IdiomKind::ChainComparison).scenario->which ==
          ScenarioPattern::Which::AndBoolOp);
    CHECK(spec_for(IdiomKind::TruthTest).scenario->which ==
          ScenarioPattern::Which::TestPosition);
    CHECK(spec_for(IdiomKind::StarInFuncCall).scenario->which ==
          ScenarioPattern::Which::CallNode);
}

TEST_CASE("component column matches the knowledge table") {
    auto pair_of = [](IdiomKind k) { return std::get<NodePair>(spec_for(k).component); };
    auto run_of = [](IdiomKind k) { return std::get<ConsecutiveRun>(spec_for(k).component); };
    auto single_of = [](IdiomKind k) { return std::get<SingleNode>(spec_for(k).component); };

    // list/set/dict: a For node and an Assign node.
    for (IdiomKind k : {IdiomKind::ListComprehension, IdiomKind::SetComprehension,
                        IdiomKind::DictComprehension}) {
        const auto p = pair_of(k);
        CHECK(p.first == NodeKind::For);
        CHECK(p.second == NodeKind::Assign);
        CHECK(p.rule == NodePair::Adjacency::InitBeforeLoop);
    }
    // chain-comparison: two Compare nodes within the scenario.
    const auto chain = pair_of(IdiomKind::ChainComparison);
    CHECK(chain.first == NodeKind::Compare);
    CHECK(chain.second == NodeKind::Compare);
    CHECK(chain.rule == NodePair::Adjacency::WithinScenario);
    // truth-test: a Compare node.
    CHECK(single_of(IdiomKind::TruthTest).kind == NodeKind::Compare);
    // loop-else: a For/While node plus the next-statement If.
    const auto le = pair_of(IdiomKind::LoopElse);
    CHECK(le.first == NodeKind::For);
    CHECK(le.first_alt == NodeKind::While);
    CHECK(le.second == NodeKind::If);
    CHECK(le.rule == NodePair::Adjacency::NextStatement);
    // runs of assigns / subscripts.
    CHECK(run_of(IdiomKind::AssignMultiTargets).kind == NodeKind::Assign);
    CHECK(run_of(IdiomKind::ChainAssignSameValue).kind == NodeKind::Assign);
    CHECK(run_of(IdiomKind::StarInFuncCall).kind == NodeKind::Subscript);
    CHECK(run_of(IdiomKind::AssignMultiTargets).min_len == 2);
    // single nodes.
    CHECK(single_of(IdiomKind::ForMultiTargets).kind == NodeKind::For);
    CHECK(single_of(IdiomKind::With).kind == NodeKind::Call);
    CHECK(single_of(IdiomKind::Enumerate).kind == NodeKind::For);
    CHECK(single_of(IdiomKind::Fstring).kind == NodeKind::BinOp);
}

TEST_CASE("condition column matches the knowledge table") {
    auto conds = [](IdiomKind k) { return spec_for(k).conditions; };
    auto has = [&](IdiomKind k, ConditionId c) {
        const auto cs = conds(k);
        return std::find(cs.begin(), cs.end(), c) != cs.end();
    };
    CHECK(conds(IdiomKind::ChainComparison) ==
          std::vector<ConditionId>{ConditionId::CompareOperandsIntersect});
    CHECK(has(IdiomKind::ListComprehension, ConditionId::ForHasAppendCall));
    CHECK(has(IdiomKind::SetComprehension, ConditionId::ForHasAddCall));
    CHECK(has(IdiomKind::DictComprehension, ConditionId::ForHasSubscriptAssign));
    CHECK(has(IdiomKind::TruthTest, ConditionId::CompareOpIsEqOrNotEq));
    CHECK(has(IdiomKind::TruthTest, ConditionId::OneOperandIsEmptySetLiteral));
    CHECK(has(IdiomKind::LoopElse, ConditionId::LoopHasBreak));
    CHECK(has(IdiomKind::LoopElse, ConditionId::IfIsNextStatementOfLoop));
    CHECK(has(IdiomKind::ForMultiTargets, ConditionId::SubscriptValueIsLoopVariable));
    CHECK(has(IdiomKind::StarInFuncCall, ConditionId::SubscriptValuesSame));
    CHECK(has(IdiomKind::With, ConditionId::CalleeNameIsOpen));
    CHECK(has(IdiomKind::Enumerate, ConditionId::IterNotEnumerateCall));
    CHECK(has(IdiomKind::ChainAssignSameValue, ConditionId::AssignValuesAllSame));
    CHECK(has(IdiomKind::Fstring, ConditionId::BinOpIsPercent));

    // The assign-multi-targets table row has no condition: every attached
    // condition is artifact-added safety.
    for (ConditionId c : conds(IdiomKind::AssignMultiTargets)) {
        CHECK(condition_info(c).artifact_added);
    }
    // Table-origin conditions are flagged as such.
    CHECK(!condition_info(ConditionId::CompareOperandsIntersect).artifact_added);
    CHECK(!condition_info(ConditionId::CalleeNameIsOpen).artifact_added);
    CHECK(condition_info(ConditionId::StarIndicesValid).artifact_added);
    CHECK(condition_info(ConditionId::NoCrossDependency).artifact_added);
}

TEST_CASE("abstraction modes per idiom") {
    CHECK(spec_for(IdiomKind::ChainComparison).abstraction == AbstractionMode::OperandMapping);
    for (IdiomKind k : {IdiomKind::StarInFuncCall, IdiomKind::ForMultiTargets,
                        IdiomKind::Enumerate}) {
        CHECK(spec_for(k).abstraction == AbstractionMode::SpecifiedObject);
    }
    for (IdiomKind k : {IdiomKind::ListComprehension, IdiomKind::TruthTest, IdiomKind::LoopElse,
                        IdiomKind::AssignMultiTargets, IdiomKind::ChainAssignSameValue,
                        IdiomKind::With, IdiomKind::Fstring}) {
        CHECK(spec_for(k).abstraction == AbstractionMode::NoAbstraction);
    }
}

TEST_CASE("idiom names round-trip") {
    for (IdiomKind k : kAllIdioms) {
        CHECK(idiom_from_name(idiom_name(k)) == k);
    }
    CHECK(!idiom_from_name("bogus"));
}

TEST_CASE("catalog json export schema") {
    const auto doc = nlohmann::json::parse(catalog_json());
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == 13);
    for (const auto& entry : doc) {
        CHECK(entry.contains("kind"));
        CHECK(entry.contains("scenario"));
        CHECK(entry.contains("component"));
        REQUIRE(entry.contains("conditions"));
        for (const auto& c : entry["conditions"]) {
            CHECK(c.contains("name"));
            CHECK(c.contains("description"));
            CHECK((c["origin"] == "table" || c["origin"] == "artifact"));
        }
    }
    CHECK(doc[3]["kind"] == "chain-comparison");
    CHECK(doc[3]["scenario"].get<std::string>().find("and") != std::string::npos);
}
