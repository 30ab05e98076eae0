#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "idiomizer/engine.hpp"
#include "idiomizer/tokens.hpp"

#include "support/golden.hpp"

using namespace idiomizer;

namespace {

std::string accepted_code(const IdiomatizationOutcome& out) {
    REQUIRE(accepted(out) != nullptr);
    return accepted(out)->abstract_idiomatic_code;
}

// Deterministic engine over a one-site file; Accepted code comes back with
// its abstraction bindings restored (the form rewriting splices in).
IdiomatizationOutcome run_engine(const std::string& file_text, IdiomKind kind) {
    const SourceFile file = SourceFile::from_text("t.py", file_text);
    const Ast ast = parse_source(file.text());
    const auto sites = find_sites(file, ast, {kind});
    REQUIRE(sites.size() == 1);
    const auto abstraction = abstract_site(sites[0], file);
    DeterministicEngine engine;
    EngineContext ctx;
    ctx.file = &file;
    ctx.site = &sites[0];
    IdiomatizationOutcome out = engine.idiomatize(ctx, abstraction.result);
    if (const Accepted* acc = accepted(out)) {
        return Accepted{restore(acc->abstract_idiomatic_code, abstraction.result.bindings)};
    }
    return out;
}

// ---- independent chain oracle ----------------------------------------------
// Evaluates comparison chains over small integer assignments; shares nothing
// with the production merge path.

struct OracleCmp {
    std::vector<std::string> operands;
    std::vector<std::string> ops;
};

OracleCmp oracle_parse(const std::string& text) {
    OracleCmp c;
    std::string word;
    std::istringstream in(text);
    std::vector<std::string> toks;
    while (in >> word) toks.push_back(word);
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i % 2 == 0) {
            c.operands.push_back(toks[i]);
        } else {
            c.ops.push_back(toks[i]);
        }
    }
    return c;
}

bool oracle_cmp(long long a, const std::string& op, long long b) {
    if (op == "<") return a < b;
    if (op == "<=") return a <= b;
    if (op == ">") return a > b;
    if (op == ">=") return a >= b;
    if (op == "==") return a == b;
    if (op == "!=") return a != b;
    FAIL("unknown op ", op);
    return false;
}

bool oracle_eval(const OracleCmp& c, const std::map<std::string, long long>& env) {
    for (std::size_t i = 0; i < c.ops.size(); ++i) {
        if (!oracle_cmp(env.at(c.operands[i]), c.ops[i], env.at(c.operands[i + 1]))) {
            return false;
        }
    }
    return true;
}

std::vector<std::map<std::string, long long>> all_envs(const std::set<std::string>& symbols) {
    std::vector<std::map<std::string, long long>> envs{{}};
    for (const std::string& s : symbols) {
        std::vector<std::map<std::string, long long>> next;
        for (const auto& env : envs) {
            for (long long v : {0, 1, 2}) {
                auto e = env;
                e[s] = v;
                next.push_back(std::move(e));
            }
        }
        envs = std::move(next);
    }
    return envs;
}

}  // namespace

TEST_CASE("chain merge: the worked examples, token-exact") {
    CHECK(accepted_code(chain_two_compares("a > b", "a < 1")) == "b < a < 1");
    CHECK(accepted_code(chain_two_compares("v1 > v2", "v3 == v2")) == "v1 > v2 == v3");
    CHECK(accepted_code(chain_two_compares("0 < y_int < h_i", "w_i < 0")) ==
          "w_i < 0 < y_int < h_i");
    CHECK(accepted_code(chain_two_compares("a != c", "c > d")) == "a != c > d");
}

TEST_CASE("chain merge declines irreversible and unalignable pairs") {
    const auto in_pair = chain_two_compares("v1 in v2", "v3 in v2");
    REQUIRE(declined(in_pair) != nullptr);
    CHECK(declined(in_pair)->reason.find("'in'") != std::string::npos);
    // Shared operand stuck in the middle.
    CHECK(declined(chain_two_compares("a < b < c", "b > d")) != nullptr);
    // No shared operand at all.
    CHECK(declined(chain_two_compares("a < b", "c < d")) != nullptr);
    // in chains merge when no reversal is needed.
    CHECK(accepted_code(chain_two_compares("a <= b", "b in c")) == "a <= b in c");
}

TEST_CASE("chain merge random pairs against the truth-table oracle") {
    std::mt19937 rng(2024);
    const std::vector<std::string> symbols = {"v1", "v2", "v3"};
    const std::vector<std::string> ops = {"<", "<=", ">", ">=", "==", "!="};
    auto random_compare = [&]() {
        const int n_ops = 1 + static_cast<int>(rng() % 2);
        std::string text = symbols[rng() % symbols.size()];
        for (int i = 0; i < n_ops; ++i) {
            text += " " + ops[rng() % ops.size()] + " " + symbols[rng() % symbols.size()];
        }
        return text;
    };
    int accepted_count = 0;
    for (int round = 0; round < 500; ++round) {
        const std::string c1 = random_compare();
        const std::string c2 = random_compare();
        const auto out = chain_two_compares(c1, c2);
        if (!accepted(out)) continue;
        ++accepted_count;
        const OracleCmp m = oracle_parse(accepted(out)->abstract_idiomatic_code);
        const OracleCmp o1 = oracle_parse(c1);
        const OracleCmp o2 = oracle_parse(c2);
        for (const auto& env : all_envs({"v1", "v2", "v3"})) {
            CHECK(oracle_eval(m, env) == (oracle_eval(o1, env) && oracle_eval(o2, env)));
        }
    }
    CHECK(accepted_count > 50);  // the generator must exercise the merge path
}

TEST_CASE("comprehension builder: table and motivating examples") {
    CHECK(tokens_equal(accepted_code(run_engine(golden::cases()[0].file_text,
                                                IdiomKind::ListComprehension)),
                       "new_cols = [col + postfix for col in old_cols]"));
    CHECK(tokens_equal(accepted_code(run_engine(golden::cases()[1].file_text,
                                                IdiomKind::SetComprehension)),
                       "z2 = {z for z in y if z is not x and z in df}"));
    CHECK(tokens_equal(accepted_code(run_engine(
                           "d = {}\nfor k in keys:\n    d[k] = values[k]\n",
                           IdiomKind::DictComprehension)),
                       "d = {k: values[k] for k in keys}"));
}

TEST_CASE("comprehension builder: nested loops and guard blocks") {
    CHECK(tokens_equal(
        accepted_code(run_engine("flat = []\n"
                                 "for row in grid:\n"
                                 "    for cell in row:\n"
                                 "        flat.append(cell)\n",
                                 IdiomKind::ListComprehension)),
        "flat = [cell for row in grid for cell in row]"));
    CHECK(tokens_equal(
        accepted_code(run_engine("out = []\n"
                                 "for x in xs:\n"
                                 "    if x > 0:\n"
                                 "        out.append(x * 2)\n",
                                 IdiomKind::ListComprehension)),
        "out = [x * 2 for x in xs if x > 0]"));
}

TEST_CASE("build_comprehension declines break and residual statements") {
    const auto broke = build_comprehension(
        "for x in xs:\n    if x:\n        break\n    out.append(x)\n", "out = []",
        CompFlavor::List);
    CHECK(declined(broke) != nullptr);
    const auto residual = build_comprehension(
        "for x in xs:\n    out.append(x)\n    tally = tally + 1\n", "out = []",
        CompFlavor::List);
    CHECK(declined(residual) != nullptr);
    const auto with_else = build_comprehension(
        "for x in xs:\n    if c:\n        out.append(x)\n    else:\n        out.append(0)\n",
        "out = []", CompFlavor::List);
    CHECK(declined(with_else) != nullptr);
}

TEST_CASE("truth-test transform directions") {
    CHECK(accepted_code(run_engine("if embedding_dim % 2 == 0:\n    pass\n",
                                   IdiomKind::TruthTest)) == "not embedding_dim % 2");
    CHECK(accepted_code(run_engine("if 0 == n:\n    pass\n", IdiomKind::TruthTest)) == "not n");
    CHECK(accepted_code(run_engine("if name != '':\n    pass\n", IdiomKind::TruthTest)) ==
          "name");
    CHECK(accepted_code(run_engine("if items != []:\n    pass\n", IdiomKind::TruthTest)) ==
          "items");
}

TEST_CASE("assign transforms") {
    CHECK(accepted_code(run_engine("self._ad = device\nself._sl4a_client = None\n",
                                   IdiomKind::AssignMultiTargets)) ==
          "self._ad, self._sl4a_client = device, None");
    CHECK(accepted_code(run_engine("global_draw_name = None\n_test_name = None\n",
                                   IdiomKind::ChainAssignSameValue)) ==
          "global_draw_name = _test_name = None");
    // Tuple-valued right-hand sides keep their grouping.
    CHECK(accepted_code(run_engine("a = 1, 2\nb = 3\n", IdiomKind::AssignMultiTargets)) ==
          "a, b = (1, 2), 3");
    // Interior comments are hoisted, not dropped.
    const auto commented =
        accepted_code(run_engine("a = 1\n# keep me\nb = 2\n", IdiomKind::AssignMultiTargets));
    CHECK(commented.find("# keep me") != std::string::npos);
    CHECK(commented.find("a, b = 1, 2") != std::string::npos);
}

TEST_CASE("loop-else transform keeps body bytes") {
    const auto out = run_engine(
        "while attempt < 3:\n"
        "    attempt = attempt + 1\n"
        "    if body is not None:\n"
        "        break\n"
        "if body is None:\n"
        "    log()\n",
        IdiomKind::LoopElse);
    const std::string code = accepted_code(out);
    CHECK(code.find("else:\n    log()") != std::string::npos);
    CHECK(code.find("if body is None") == std::string::npos);
}

TEST_CASE("for-multi transform uses fresh names and a starred rest") {
    CHECK(tokens_equal(accepted_code(run_engine(
                           "for sample in family.samples:\n"
                           "    if sample[0] > 2:\n"
                           "        use(sample[0])\n",
                           IdiomKind::ForMultiTargets)),
                       "for e0, *e in family.samples:\n    if e0 > 2:\n        use(e0)"));
    // Higher indices materialize intermediate names.
    CHECK(tokens_equal(accepted_code(run_engine(
                           "for s in xs:\n    use(s[0], s[2])\n",
                           IdiomKind::ForMultiTargets)),
                       "for e0, e1, e2, *e in xs:\n    use(e0, e2)"));
    // Collisions pick the next free name.
    const auto collided = accepted_code(run_engine(
        "e0 = 1\nprint(e0)\nfor s in xs:\n    use(s[0])\n", IdiomKind::ForMultiTargets));
    CHECK(collided.find("e02") != std::string::npos);
}

TEST_CASE("star transform renders the slice end literally") {
    CHECK(accepted_code(run_engine("f(gate_channels[i], gate_channels[i + 1])\n",
                                   IdiomKind::StarInFuncCall)) ==
          "*gate_channels[i:i + 2]");
    CHECK(accepted_code(run_engine("f(a[0], a[1], a[2])\n", IdiomKind::StarInFuncCall)) ==
          "*a[0:3]");
    // All-negative run ending at -1 uses the open-ended slice.
    CHECK(accepted_code(run_engine("f(feat.shape[-2], feat.shape[-1])\n",
                                   IdiomKind::StarInFuncCall)) == "*feat.shape[-2:]");
    CHECK(accepted_code(run_engine("f(a[-4], a[-3])\n", IdiomKind::StarInFuncCall)) ==
          "*a[-4:-2]");
}

TEST_CASE("with transform binds a fresh handle") {
    CHECK(accepted_code(run_engine("bamfiles = [x.strip() for x in open(bamfile)]\n",
                                   IdiomKind::With)) ==
          "with open(bamfile) as f:\n    bamfiles = [x.strip() for x in f]");
    // f taken: next name.
    const auto taken = accepted_code(
        run_engine("f = 1\nprint(f)\ndata = [x for x in open(p)]\n", IdiomKind::With));
    CHECK(taken.find("as f2:") != std::string::npos);
}

TEST_CASE("enumerate transform drops the element binding") {
    CHECK(accepted_code(run_engine(
              "for i in range(len(text)):\n"
              "    w = text[i]\n"
              "    if w in token2id:\n"
              "        R[i] = token2id[w]\n",
              IdiomKind::Enumerate)) ==
          "for (i, w) in enumerate(text):\n"
          "    if w in token2id:\n"
          "        R[i] = token2id[w]");
    // No binding statement: a fresh element name is substituted.
    CHECK(tokens_equal(accepted_code(run_engine(
                           "for i in range(len(xs)):\n    print(i, xs[i])\n",
                           IdiomKind::Enumerate)),
                       "for (i, w) in enumerate(xs):\n    print(i, w)"));
    // Assigning through the subscript declines.
    const auto out = run_engine("for i in range(len(xs)):\n    xs[i] = xs[i] + 1\n",
                                IdiomKind::Enumerate);
    CHECK(declined(out) != nullptr);
}

TEST_CASE("fstring transform specifiers") {
    CHECK(accepted_code(run_engine(
              "log.info('sample_num_list is %s' % repr(self.sample_num_list))\n",
              IdiomKind::Fstring)) == "f'sample_num_list is {repr(self.sample_num_list)}'");
    CHECK(accepted_code(run_engine("m = 'n=%d %r %f' % (n, o, x)\n", IdiomKind::Fstring)) ==
          "f'n={n:d} {o!r} {x:f}'");
    // Raw prefix survives.
    CHECK(accepted_code(run_engine("m = r'v %s' % x\n", IdiomKind::Fstring)) == "fr'v {x}'");
    // Literal braces are escaped.
    CHECK(accepted_code(run_engine("m = '{%s}' % x\n", IdiomKind::Fstring)) == "f'{{{x}}}'");
    for (const char* bad : {"m = 'p %% q %s' % x\n", "m = 'w %5d' % n\n",
                            "m = '%s %s' % pair\n", "m = '%s' % (a, b)\n"}) {
        CHECK(declined(run_engine(bad, IdiomKind::Fstring)) != nullptr);
    }
}

TEST_CASE("non-adjacent chain conjuncts decline") {
    const auto out = run_engine("r = a > b and other and a < 1\n", IdiomKind::ChainComparison);
    REQUIRE(declined(out) != nullptr);
    CHECK(declined(out)->reason.find("adjacent") != std::string::npos);
}

TEST_CASE("marker invariant holds for every accepted golden output") {
    for (const auto& g : golden::cases()) {
        const auto out = run_engine(g.file_text, g.idiom);
        REQUIRE_MESSAGE(accepted(out) != nullptr, g.id);
        std::string probe = accepted(out)->abstract_idiomatic_code;
        if (g.idiom == IdiomKind::StarInFuncCall) probe = "probe_(" + probe + ")";
        CHECK_MESSAGE(has_idiom_marker(g.idiom, probe), g.id);
    }
}

TEST_CASE("reply parsing: yes, no, malformed") {
    const auto yes = parse_engine_reply("Yes\n```python\nv1 > v2 == v3\n```\n");
    REQUIRE(accepted(yes) != nullptr);
    CHECK(accepted(yes)->abstract_idiomatic_code == "v1 > v2 == v3");

    const auto yes_plain_fence = parse_engine_reply("yes, it works\n```\nx = [a for a in b]\n```");
    REQUIRE(accepted(yes_plain_fence) != nullptr);

    const auto no = parse_engine_reply("No, reversing compare operands is invalid\n");
    REQUIRE(declined(no) != nullptr);
    CHECK(declined(no)->reason.find("reversing") != std::string::npos);

    for (const char* bad : {"maybe?", "", "Yes\nno code block here", "Yesterday\n```x```"}) {
        const auto out = parse_engine_reply(bad);
        REQUIRE(declined(out) != nullptr);
        CHECK(declined(out)->reason.find("malformed") != std::string::npos);
    }
}

TEST_CASE("prompt library pins the chain-comparison instruction verbatim") {
    const auto& chain = prompt_for(IdiomKind::ChainComparison);
    CHECK(chain.instruction ==
          "Reverse compare operands of the first comparison operation, the second comparison, "
          "or the first and the second comparison operations so that \"v2 and v2\" is in the "
          "new Python code, and then simplify it");
    CHECK(abstraction_prompt().find("Use a symbol v to simplify each comparison operand") == 0);
    for (IdiomKind k : kAllIdioms) {
        const auto& t = prompt_for(k);
        CHECK(t.idiom == k);
        CHECK(!t.instruction.empty());
        CHECK(t.examples.size() <= 3);
        const std::string rendered = render_prompt(t, "CODE_SENTINEL");
        CHECK(rendered.find("CODE_SENTINEL") != std::string::npos);
    }
}

TEST_CASE("engine request hash is stable and input-sensitive") {
    EngineRequest r1{IdiomKind::ChainComparison, "p", "c", 0.0};
    EngineRequest r2{IdiomKind::ChainComparison, "p", "c", 0.0};
    EngineRequest r3{IdiomKind::ChainComparison, "p", "d", 0.0};
    CHECK(r1.request_sha256() == r2.request_sha256());
    CHECK(r1.request_sha256() != r3.request_sha256());
    CHECK(r1.temperature == 0.0);
}
