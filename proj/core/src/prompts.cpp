#include "idiomizer/engine.hpp"

namespace idiomizer {

const std::string& abstraction_prompt() {
    static const std::string prompt =
        "Use a symbol v to simplify each comparison operand within the following Python code. "
        "The same comparison operand is represented by the same symbol.";
    return prompt;
}

const PromptTemplate& prompt_for(IdiomKind kind) {
    static const std::vector<PromptTemplate> templates = {
        {IdiomKind::ListComprehension,
         "Rewrite the initializer assignment and for statement as a single list comprehension "
         "assigned to the same variable. Turn every \"if C: continue\" guard into its negated "
         "comprehension condition and join conditions with \"and\". Respond with Yes and the "
         "rewritten code in a fenced code block, or No and a reason if it cannot be rewritten.",
         {{"r = []\nfor x in xs:\n    r.append(x + 1)", "r = [x + 1 for x in xs]"},
          {"r = []\nfor x in xs:\n    if x is None:\n        continue\n    r.append(x)",
           "r = [x for x in xs if x is not None]"}}},
        {IdiomKind::SetComprehension,
         "Rewrite the initializer assignment and for statement as a single set comprehension "
         "assigned to the same variable. Turn every \"if C: continue\" guard into its negated "
         "comprehension condition and join conditions with \"and\". Respond with Yes and the "
         "rewritten code in a fenced code block, or No and a reason if it cannot be rewritten.",
         {{"s = set()\nfor x in xs:\n    s.add(x * 2)", "s = {x * 2 for x in xs}"}}},
        {IdiomKind::DictComprehension,
         "Rewrite the initializer assignment and for statement as a single dict comprehension "
         "assigned to the same variable. Respond with Yes and the rewritten code in a fenced "
         "code block, or No and a reason if it cannot be rewritten.",
         {{"d = {}\nfor k in ks:\n    d[k] = f(k)", "d = {k: f(k) for k in ks}"}}},
        {IdiomKind::ChainComparison,
         "Reverse compare operands of the first comparison operation, the second comparison, "
         "or the first and the second comparison operations so that \"v2 and v2\" is in the "
         "new Python code, and then simplify it",
         {{"v1 > v2 and v3 == v2", "v1 > v2 == v3"},
          {"v1 > v2 and v1 < v3", "v2 < v1 < v3"}}},
        {IdiomKind::TruthTest,
         "Rewrite the comparison against the empty value as a direct truthiness test: "
         "\"E == empty\" becomes \"not E\" and \"E != empty\" becomes \"E\". Respond with Yes "
         "and the rewritten code in a fenced code block, or No and a reason.",
         {{"n % 2 == 0", "not n % 2"}, {"name != \"\"", "name"}}},
        {IdiomKind::LoopElse,
         "Attach the if statement that follows the loop as the loop's else clause, deleting "
         "the if header. The if test is the negation of the loop's break guard. Respond with "
         "Yes and the rewritten code in a fenced code block, or No and a reason.",
         {}},
        {IdiomKind::AssignMultiTargets,
         "Merge the consecutive assignments into one assignment with multiple targets: "
         "\"a = x\" then \"b = y\" becomes \"a, b = x, y\". Respond with Yes and the rewritten "
         "code in a fenced code block, or No and a reason.",
         {{"a = 1\nb = 2", "a, b = 1, 2"}}},
        {IdiomKind::ForMultiTargets,
         "Unpack the iterated value in the for target instead of subscripting it in the body: "
         "uses of v[0], v[1], ... become names bound in the target, with a starred rest. "
         "Respond with Yes and the rewritten code in a fenced code block, or No and a reason.",
         {{"for v in rows:\n    if v[0] > 2:\n        pass",
           "for e0, *e in rows:\n    if e0 > 2:\n        pass"}}},
        {IdiomKind::StarInFuncCall,
         "Replace the run of consecutive subscripts of v with one starred slice argument "
         "covering the same indices. Respond with Yes and the rewritten code in a fenced code "
         "block, or No and a reason.",
         {{"v[-2], v[-1]", "*v[-2:]"}, {"v[i], v[i+1]", "*v[i:i + 2]"}}},
        {IdiomKind::With,
         "Wrap the statement in a with block that opens the file and binds it to a fresh name, "
         "substituting that name for the open(...) call. Respond with Yes and the rewritten "
         "code in a fenced code block, or No and a reason.",
         {{"data = [l for l in open(p)]", "with open(p) as f:\n    data = [l for l in f]"}}},
        {IdiomKind::Enumerate,
         "Rewrite the range(len(v)) loop to iterate enumerate(v) with an (index, element) "
         "target, dropping the element binding statement if present. Respond with Yes and the "
         "rewritten code in a fenced code block, or No and a reason.",
         {{"for i in range(len(v)):\n    w = v[i]\n    use(i, w)",
           "for (i, w) in enumerate(v):\n    use(i, w)"}}},
        {IdiomKind::ChainAssignSameValue,
         "Merge the consecutive assignments of the same value into one chained assignment: "
         "\"a = V\" then \"b = V\" becomes \"a = b = V\". Respond with Yes and the rewritten "
         "code in a fenced code block, or No and a reason.",
         {{"a = None\nb = None", "a = b = None"}}},
        {IdiomKind::Fstring,
         "Convert the %-formatting expression into an f-string, mapping %s to {e}, %r to {e!r}, "
         "%d to {e:d} and %f to {e:f}. Respond with Yes and the rewritten code in a fenced code "
         "block, or No and a reason if any other specifier appears.",
         {{"'x is %s' % x", "f'x is {x}'"}}},
    };
    for (const PromptTemplate& t : templates) {
        if (t.idiom == kind) return t;
    }
    return templates.front();
}

std::string render_prompt(const PromptTemplate& tmpl, std::string_view abstract_code) {
    std::string out = tmpl.instruction;
    for (const auto& [input, output] : tmpl.examples) {
        out += "\n\nExample input:\n```python\n";
        out += input;
        out += "\n```\nExample output:\nYes\n```python\n";
        out += output;
        out += "\n```";
    }
    out += "\n\nPython code:\n```python\n";
    out += abstract_code;
    out += "\n```";
    return out;
}

}  // namespace idiomizer
