#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qnclab/concordance.hpp"
#include "qnclab/errors.hpp"

using namespace qnclab;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

TEST_CASE("the registry covers every required claim") {
    CHECK(concordance_gaps(concordance_registry(), required_claims()).empty());
    const std::string table = render_concordance();
    int rows = 0;
    std::istringstream lines(table);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("| ", 0) == 0 && line.find("Claim") == std::string::npos &&
            line.find("---") == std::string::npos) {
            ++rows;
        }
    }
    CHECK(rows >= 20);
}

TEST_CASE("removing an entry is caught and named") {
    std::vector<ConcordanceEntry> mutilated = concordance_registry();
    std::string removed;
    for (auto it = mutilated.begin(); it != mutilated.end(); ++it) {
        if (it->claim == "median-estimator") {
            removed = it->claim;
            mutilated.erase(it);
            break;
        }
    }
    REQUIRE(!removed.empty());
    const std::vector<std::string> gaps = concordance_gaps(mutilated, required_claims());
    REQUIRE(gaps.size() == 1);
    CHECK(gaps.front() == "median-estimator");
}

TEST_CASE("every referenced test name exists in the test suite") {
    const std::filesystem::path tests_dir(QNCLAB_TESTS_DIR);
    std::string corpus;
    for (const auto& entry : std::filesystem::directory_iterator(tests_dir)) {
        if (entry.path().extension() == ".cpp") {
            corpus += read_file(entry.path());
        }
    }
    for (const ConcordanceEntry& entry : concordance_registry()) {
        INFO("claim ", entry.claim, " references test '", entry.test_name, "'");
        CHECK(corpus.find(entry.test_name) != std::string::npos);
    }
}

TEST_CASE("the committed concordance file is current") {
    const std::filesystem::path root =
        std::filesystem::path(QNCLAB_TESTS_DIR).parent_path();
    const std::string committed = read_file(root / "CONCORDANCE.md");
    CHECK(committed == render_concordance());
}
