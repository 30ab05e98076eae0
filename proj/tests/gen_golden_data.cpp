// Regenerates the committed test data: the golden benchmark JSONL and the
// replay fixture store. Usage: gen_golden_data <output-dir>

#include <fstream>
#include <iostream>

#include <json.hpp>

#include "support/fixture_gen.hpp"
#include "support/golden.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: gen_golden_data <output-dir>\n";
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);

    {
        std::ofstream out(dir / "golden.jsonl", std::ios::binary | std::ios::trunc);
        for (const auto& g : golden::cases()) {
            nlohmann::ordered_json j;
            j["method_source"] = g.file_text;
            j["idiom"] = std::string(idiomizer::idiom_name(g.idiom));
            j["gold_pairs"] = nlohmann::ordered_json::array(
                {{{"non_idiomatic", g.non_idiomatic}, {"idiomatic", g.idiomatic}}});
            out << j.dump() << "\n";
        }
    }
    {
        std::ofstream out(dir / "fixtures_golden.jsonl", std::ios::binary | std::ios::trunc);
        out << testsup::golden_fixture_jsonl();
    }
    std::cout << "wrote " << (dir / "golden.jsonl").string() << " and "
              << (dir / "fixtures_golden.jsonl").string() << "\n";
    return 0;
}
