#include <benchmark/benchmark.h>

#include <string>

#include "idiomizer/abstraction.hpp"
#include "idiomizer/engine.hpp"
#include "idiomizer/extraction.hpp"
#include "idiomizer/pipeline.hpp"
#include "idiomizer/rewriting.hpp"
#include "idiomizer/tokens.hpp"

namespace {

// ~6-line blocks with one idiom site per repetition mixed into filler.
std::string synth_file(int blocks) {
    std::string text;
    for (int i = 0; i < blocks; ++i) {
        const std::string s = std::to_string(i);
        switch (i % 5) {
            case 0:
                text += "rows_" + s + " = []\nfor r_" + s + " in src_" + s + ":\n    rows_" +
                        s + ".append(r_" + s + " * 2)\n";
                break;
            case 1:
                text += "flag_" + s + " = lo_" + s + " > m_" + s + " and lo_" + s + " < 9\n";
                break;
            case 2:
                text += "def helper_" + s + "(x):\n    return x + " + s + "\n";
                break;
            case 3:
                text += "msg_" + s + " = 'value %s' % name_" + s + "\n";
                break;
            default:
                text += "for i_" + s + " in range(len(ws_" + s + ")):\n    print(ws_" + s +
                        "[i_" + s + "])\n";
                break;
        }
        text += "print('sep_" + s + "')\n";
    }
    return text;
}

void BM_Tokenize(benchmark::State& state) {
    const std::string text = synth_file(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(idiomizer::tokenize(text));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_Tokenize)->Arg(32)->Arg(256);

void BM_ParseSource(benchmark::State& state) {
    const std::string text = synth_file(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(idiomizer::parse_source(text));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_ParseSource)->Arg(32)->Arg(256);

void BM_FindSitesAllIdioms(benchmark::State& state) {
    const std::string text = synth_file(static_cast<int>(state.range(0)));
    const auto file = idiomizer::SourceFile::from_text("bench.py", text);
    const auto ast = idiomizer::parse_source(file.text());
    const std::vector<idiomizer::IdiomKind> all(idiomizer::kAllIdioms.begin(),
                                                idiomizer::kAllIdioms.end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(idiomizer::find_sites(file, ast, all));
    }
}
BENCHMARK(BM_FindSitesAllIdioms)->Arg(32)->Arg(256);

void BM_Splice(benchmark::State& state) {
    const std::string text = synth_file(64);
    std::vector<idiomizer::Edit> edits;
    for (std::size_t pos = 10; pos + 40 < text.size(); pos += 97) {
        edits.emplace_back(idiomizer::Span{pos, pos + 5}, "patch");
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(idiomizer::splice(text, edits));
    }
}
BENCHMARK(BM_Splice);

void BM_ChainMerge(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(idiomizer::chain_two_compares("v1 > v2", "v3 == v2"));
    }
}
BENCHMARK(BM_ChainMerge);

void BM_RefactorFixpoint(benchmark::State& state) {
    const std::string text = synth_file(static_cast<int>(state.range(0)));
    const std::vector<idiomizer::IdiomKind> all(idiomizer::kAllIdioms.begin(),
                                                idiomizer::kAllIdioms.end());
    idiomizer::DeterministicEngine engine;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            idiomizer::process_text("bench.py", text, all, engine, 5));
    }
}
BENCHMARK(BM_RefactorFixpoint)->Arg(32)->Arg(128);

void BM_UnifiedDiff(benchmark::State& state) {
    const std::string before = synth_file(128);
    std::string after = before;
    after.replace(after.find("print('sep_40')"), 15, "print('changed')");
    after.replace(after.find("print('sep_90')"), 15, "print('changed2')");
    for (auto _ : state) {
        benchmark::DoNotOptimize(idiomizer::unified_diff(before, after, "bench.py"));
    }
}
BENCHMARK(BM_UnifiedDiff);

}  // namespace

BENCHMARK_MAIN();
