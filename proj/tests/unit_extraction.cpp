#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "idiomizer/extraction.hpp"
#include "idiomizer/tokens.hpp"

#include "support/golden.hpp"

using namespace idiomizer;

namespace {

struct Parsed {
    SourceFile file;
    Ast ast;
};

Parsed parse(const std::string& text) {
    Parsed p{SourceFile::from_text("test.py", text), {}};
    p.ast = parse_source(p.file.text());
    return p;
}

std::vector<MatchSite> sites_of(const Parsed& p, IdiomKind kind) {
    return find_sites(p.file, p.ast, {kind});
}

}  // namespace

TEST_CASE("chain scenario: and-boolop only") {
    const auto p = parse("x = a > b and a < 1\ny = a > b or a < 1\n");
    const auto scen = extract_scenarios(p.ast, spec_for(IdiomKind::ChainComparison));
    REQUIRE(scen.size() == 1);
    CHECK(node_text(*scen[0], p.file) == "a > b and a < 1");
    CHECK(sites_of(p, IdiomKind::ChainComparison).size() == 1);
}

TEST_CASE("no scenario: whole module scope") {
    const auto p = parse("x = 1\n");
    const auto scen = extract_scenarios(p.ast, spec_for(IdiomKind::ListComprehension));
    REQUIRE(scen.size() == 1);
    CHECK(scen[0] == &p.ast.root());
}

TEST_CASE("chain pairs come from direct operands of one boolop") {
    const auto p = parse("r = (a > b and a < c) and f(x > y and x < z)\n");
    // Outer and has a BoolOp + Call operand (no Compare pair); the two inner
    // and-chains each contribute one pair.
    CHECK(sites_of(p, IdiomKind::ChainComparison).size() == 2);
}

TEST_CASE("single comparison is never a chain component") {
    const auto p = parse("if start is not None:\n    pass\n");
    CHECK(sites_of(p, IdiomKind::ChainComparison).empty());
}

TEST_CASE("comprehension components pair loop with the preceding init") {
    const auto p = parse(golden::cases()[0].file_text);
    const auto comps =
        extract_components(p.ast.root(), spec_for(IdiomKind::ListComprehension), p.file);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].nodes[0]->kind == NodeKind::For);
    CHECK(node_text(*comps[0].nodes[1], p.file) == "new_cols = []");
    CHECK(sites_of(p, IdiomKind::ListComprehension).size() == 1);
}

TEST_CASE("set loop without add call yields nothing (wrong-detection guard)") {
    // The dict-shaped loop of the motivating wrong-detection case.
    const auto p = parse(
        "counts = {}\n"
        "for w in words:\n"
        "    counts[w] = 1\n");
    CHECK(sites_of(p, IdiomKind::SetComprehension).empty());
    CHECK(sites_of(p, IdiomKind::DictComprehension).size() == 1);
}

TEST_CASE("comprehension rejects residual effects and gaps") {
    const auto residual = parse(
        "out = []\n"
        "for x in xs:\n"
        "    out.append(x)\n"
        "    other = other + 1\n");
    CHECK(sites_of(residual, IdiomKind::ListComprehension).empty());

    const auto gap = parse(
        "out = []\n"
        "probe = out\n"
        "for x in xs:\n"
        "    out.append(x)\n");
    CHECK(sites_of(gap, IdiomKind::ListComprehension).empty());

    const auto self_ref = parse(
        "out = []\n"
        "for x in xs:\n"
        "    out.append(len(out))\n");
    CHECK(sites_of(self_ref, IdiomKind::ListComprehension).empty());

    const auto wrong_init = parse(
        "out = [1]\n"
        "for x in xs:\n"
        "    out.append(x)\n");
    CHECK(sites_of(wrong_init, IdiomKind::ListComprehension).empty());
}

TEST_CASE("dict comprehension excludes augmented assignment") {
    const auto p = parse(
        "d = {}\n"
        "for k in ks:\n"
        "    d[k] += 1\n");
    CHECK(sites_of(p, IdiomKind::DictComprehension).empty());
}

TEST_CASE("truth-test components live in test positions only") {
    const auto p = parse(
        "if x == 0:\n    pass\n"
        "while y != 0 and z == 0:\n    pass\n"
        "r = [v for v in vs if v == 0]\n"
        "q = not w == 0\n"
        "f(t == 0)\n"       // argument position: not a test
        "s = u == 0\n");    // plain assignment: not a test
    CHECK(sites_of(p, IdiomKind::TruthTest).size() == 5);
}

TEST_CASE("truth-test conditions: single op against one empty literal") {
    CHECK(sites_of(parse("if x == 0:\n    pass\n"), IdiomKind::TruthTest).size() == 1);
    CHECK(sites_of(parse("if x == '':\n    pass\n"), IdiomKind::TruthTest).size() == 1);
    CHECK(sites_of(parse("if x != []:\n    pass\n"), IdiomKind::TruthTest).size() == 1);
    CHECK(sites_of(parse("if x == ():\n    pass\n"), IdiomKind::TruthTest).size() == 1);
    CHECK(sites_of(parse("if x == False:\n    pass\n"), IdiomKind::TruthTest).size() == 1);
    CHECK(sites_of(parse("if x < 0:\n    pass\n"), IdiomKind::TruthTest).empty());
    CHECK(sites_of(parse("if x == 1:\n    pass\n"), IdiomKind::TruthTest).empty());
    CHECK(sites_of(parse("if 0 == 0:\n    pass\n"), IdiomKind::TruthTest).empty());
    CHECK(sites_of(parse("if x == y == 0:\n    pass\n"), IdiomKind::TruthTest).empty());
}

TEST_CASE("loop-else pair and negation condition") {
    const auto& gold = golden::cases();
    const auto le = std::find_if(gold.begin(), gold.end(), [](const auto& g) {
        return g.idiom == IdiomKind::LoopElse;
    });
    REQUIRE(le != gold.end());
    CHECK(sites_of(parse(le->file_text), IdiomKind::LoopElse).size() == 1);

    // Non-negated post-if: no site.
    const auto wrong = parse(
        "while a < 3:\n"
        "    a = a + 1\n"
        "    if body is not None:\n"
        "        break\n"
        "if body is not None:\n"
        "    pass\n");
    CHECK(sites_of(wrong, IdiomKind::LoopElse).empty());

    // No break: no site.
    const auto nobreak = parse(
        "while a < 3:\n"
        "    a = a + 1\n"
        "if body is None:\n"
        "    pass\n");
    CHECK(sites_of(nobreak, IdiomKind::LoopElse).empty());

    // Two breaks: no unique guard.
    const auto twobreaks = parse(
        "while a < 3:\n"
        "    if body is not None:\n"
        "        break\n"
        "    if c:\n"
        "        break\n"
        "if body is None:\n"
        "    pass\n");
    CHECK(sites_of(twobreaks, IdiomKind::LoopElse).empty());
}

TEST_CASE("negation table") {
    auto negated = [](const std::string& expr) {
        const auto p = parse("if " + expr + ":\n    pass\n");
        const Node* test = nullptr;
        p.ast.walk([&](const Node& n) {
            if (n.kind == NodeKind::If) test = n.field_node("test");
        });
        REQUIRE(test != nullptr);
        return negate_test(*test, p.file.text());
    };
    CHECK(negated("a is b") == "a is not b");
    CHECK(negated("a is not b") == "a is b");
    CHECK(negated("a in b") == "a not in b");
    CHECK(negated("a not in b") == "a in b");
    CHECK(negated("a == b") == "a != b");
    CHECK(negated("a != b") == "a == b");
    CHECK(negated("a < b") == "a >= b");
    CHECK(negated("a > b") == "a <= b");
    CHECK(negated("a <= b") == "a > b");
    CHECK(negated("a >= b") == "a < b");
    CHECK(negated("not a") == "a");
    CHECK(negated("flag") == "not flag");
    CHECK(negated("a or b") == "not (a or b)");
    CHECK(negated("a < b < c") == "not a < b < c");
}

TEST_CASE("assign runs: maximal adjacent, conditions filter") {
    const auto p = parse("a = 1\nb = 2\nc = 3\n");
    const auto comps =
        extract_components(p.ast.root(), spec_for(IdiomKind::AssignMultiTargets), p.file);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].nodes.size() == 3);

    // Cross-dependency kills the run.
    CHECK(sites_of(parse("a = 1\nb = a\n"), IdiomKind::AssignMultiTargets).empty());
    // Attribute reference to an earlier target counts as a dependency.
    CHECK(sites_of(parse("self.x = 1\ny = self.x + 2\n"), IdiomKind::AssignMultiTargets)
              .empty());
    // Tuple targets are not simple.
    CHECK(sites_of(parse("a, b = 1, 2\nc = 3\n"), IdiomKind::AssignMultiTargets).empty());
    // Comments and blank lines do not break adjacency.
    CHECK(sites_of(parse("a = 1\n# note\n\nb = 2\n"), IdiomKind::AssignMultiTargets).size() ==
          1);
}

TEST_CASE("chain-assign needs identical immutable literals") {
    CHECK(sites_of(parse("a = None\nb = None\n"), IdiomKind::ChainAssignSameValue).size() == 1);
    CHECK(sites_of(parse("a = 5\nb = 5\n"), IdiomKind::ChainAssignSameValue).size() == 1);
    CHECK(sites_of(parse("a = []\nb = []\n"), IdiomKind::ChainAssignSameValue).empty());
    CHECK(sites_of(parse("a = None\nb = 0\n"), IdiomKind::ChainAssignSameValue).empty());
    CHECK(sites_of(parse("a = f()\nb = f()\n"), IdiomKind::ChainAssignSameValue).empty());
}

TEST_CASE("for-multi conditions") {
    CHECK(sites_of(parse("for s in xs:\n    print(s[0])\n"), IdiomKind::ForMultiTargets)
              .size() == 1);
    // Bare use of the loop variable disqualifies.
    CHECK(sites_of(parse("for s in xs:\n    print(s[0], s)\n"), IdiomKind::ForMultiTargets)
              .empty());
    // Negative index disqualifies.
    CHECK(sites_of(parse("for s in xs:\n    print(s[-1])\n"), IdiomKind::ForMultiTargets)
              .empty());
    // Non-literal index disqualifies.
    CHECK(sites_of(parse("for s in xs:\n    print(s[k])\n"), IdiomKind::ForMultiTargets)
              .empty());
    // Subscripts of something else do not trigger.
    CHECK(sites_of(parse("for s in xs:\n    print(other[0])\n"), IdiomKind::ForMultiTargets)
              .empty());
}

TEST_CASE("star runs and index validity") {
    auto star_sites = [&](const std::string& text) {
        return sites_of(parse(text), IdiomKind::StarInFuncCall).size();
    };
    CHECK(star_sites("f(a[0], a[1])\n") == 1);
    CHECK(star_sites("f(x, a[i], a[i + 1], y)\n") == 1);
    CHECK(star_sites("f(a[-3], a[-2])\n") == 1);
    // The wrong-detection case: slicing does not wrap.
    CHECK(star_sites("f(a[-1], a[0])\n") == 0);
    // Non-arithmetic index pair (over-eager case).
    CHECK(star_sites("g(x, n_points[idx1], n_points[idx2])\n") == 0);
    // Different bases.
    CHECK(star_sites("f(a[0], b[1])\n") == 0);
    // Gap in the run.
    CHECK(star_sites("f(a[0], a[2])\n") == 0);
    // Descending.
    CHECK(star_sites("f(a[1], a[0])\n") == 0);
    // Symbolic crossing (i-1 then i).
    CHECK(star_sites("f(a[i - 1], a[i])\n") == 0);
    // Non-consecutive arguments are split by the interloper.
    CHECK(star_sites("f(a[0], x, a[1])\n") == 0);
}

TEST_CASE("with conditions") {
    auto with_sites = [&](const std::string& text) {
        return sites_of(parse(text), IdiomKind::With).size();
    };
    CHECK(with_sites("data = [l for l in open(p)]\n") == 1);
    CHECK(with_sites("process(open(p).read())\n") == 1);
    // Already a with context.
    CHECK(with_sites("with open(p) as h:\n    pass\n") == 0);
    // Stored directly.
    CHECK(with_sites("h = open(p)\n") == 0);
    // Returned.
    CHECK(with_sites("def f():\n    return open(p)\n") == 0);
    // Attribute open is not the builtin.
    CHECK(with_sites("x = [l for l in os.open(p)]\n") == 0);
    // Compound host statement.
    CHECK(with_sites("for l in open(p):\n    pass\n") == 0);
}

TEST_CASE("enumerate conditions") {
    auto enum_sites = [&](const std::string& text) {
        return sites_of(parse(text), IdiomKind::Enumerate).size();
    };
    CHECK(enum_sites("for i in range(len(xs)):\n    print(xs[i])\n") == 1);
    CHECK(enum_sites("for i in range(len(self.xs)):\n    print(self.xs[i])\n") == 1);
    // Already enumerate.
    CHECK(enum_sites("for i, w in enumerate(xs):\n    print(i, w)\n") == 0);
    // Plain iteration.
    CHECK(enum_sites("for x in xs:\n    print(x)\n") == 0);
    // Body never subscripts the sequence with the index.
    CHECK(enum_sites("for i in range(len(xs)):\n    print(i)\n") == 0);
    // range over something else.
    CHECK(enum_sites("for i in range(n):\n    print(xs[i])\n") == 0);
}

TEST_CASE("fstring conditions") {
    auto f_sites = [&](const std::string& text) {
        return sites_of(parse(text), IdiomKind::Fstring).size();
    };
    CHECK(f_sites("m = 'v is %s' % x\n") == 1);
    CHECK(f_sites("m = 'n=%d, o=%r' % (n, o)\n") == 1);
    CHECK(f_sites("m = b'v is %s' % x\n") == 0);   // bytes
    CHECK(f_sites("m = name % x\n") == 0);         // not a literal
    CHECK(f_sites("m = 7 % x\n") == 0);            // numeric mod
}

TEST_CASE("sites are deterministic, ordered and monotone in kinds") {
    std::string text;
    for (const auto& g : golden::cases()) text += g.file_text + "\n";
    const auto p = parse(text);
    std::vector<IdiomKind> all(kAllIdioms.begin(), kAllIdioms.end());
    const auto s1 = find_sites(p.file, p.ast, all);
    const auto s2 = find_sites(p.file, p.ast, all);
    REQUIRE(s1.size() == s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(s1[i].site_id == s2[i].site_id);
        if (i > 0) CHECK(s1[i - 1].span.start <= s1[i].span.start);
    }
    // Restricting kinds never adds sites for the remaining kinds.
    for (IdiomKind k : kAllIdioms) {
        const auto restricted = find_sites(p.file, p.ast, {k});
        std::size_t in_full = 0;
        for (const auto& s : s1) {
            if (s.idiom == k) ++in_full;
        }
        CHECK(restricted.size() == in_full);
    }
    // Soundness: every site still passes its own conditions.
    for (const auto& site : s1) {
        for (ConditionId cond : spec_for(site.idiom).conditions) {
            CHECK(evaluate_condition(cond, site.idiom, site.components, p.file));
        }
    }
}

TEST_CASE("a for statement deep inside a method is still found") {
    // The deterministic scan covers the whole tree; nothing mid-method is
    // overlooked.
    const auto p = parse(
        "def process(self, y, x, df):\n"
        "    total = prepare(y)\n"
        "    if total:\n"
        "        log(total)\n"
        "    z2 = set()\n"
        "    for z in y:\n"
        "        if z is x:\n"
        "            continue\n"
        "        z2.add(z)\n"
        "    return finish(z2)\n");
    const auto sites = sites_of(p, IdiomKind::SetComprehension);
    REQUIRE(sites.size() == 1);
    CHECK(node_text(*sites[0].components.nodes[0], p.file).substr(0, 11) == "for z in y:");
}

TEST_CASE("nested for loops report independent tuples") {
    const auto p = parse(
        "for a in rows:\n"
        "    if a[0] > 1:\n"
        "        print(a[0])\n"
        "labels = []\n"
        "for b in items:\n"
        "    labels.append(b)\n");
    CHECK(sites_of(p, IdiomKind::ForMultiTargets).size() == 1);
    CHECK(sites_of(p, IdiomKind::ListComprehension).size() == 1);
}
