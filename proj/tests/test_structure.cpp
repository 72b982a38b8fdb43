#include <filesystem>
#include <fstream>
#include <regex>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<fs::path> files_under(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(e.path());
  }
  return out;
}

}  // namespace

// The training loop may only reach planners through the plan module; nothing
// below marl may know the language-model pipeline exists.
TEST(Structure, TrainingCodeNeverReachesLlmgen) {
  const fs::path root = YOLO_SOURCE_DIR;
  const std::regex forbidden(R"(llmgen|yolo_llmgen)");
  std::vector<fs::path> checked;
  for (const char* module : {"envs", "interp", "plan", "shaping", "nn", "marl"}) {
    for (const auto& dir : {root / "src" / module, root / "include" / "yolo" / module}) {
      for (const auto& f : files_under(dir)) checked.push_back(f);
    }
  }
  ASSERT_GT(checked.size(), 20u);
  for (const auto& f : checked) EXPECT_FALSE(std::regex_search(slurp(f), forbidden)) << f;
}

TEST(Structure, MarlLibraryDoesNotLinkLlmgen) {
  const auto cmake = slurp(fs::path(YOLO_SOURCE_DIR) / "src" / "CMakeLists.txt");
  const std::regex block(R"(target_link_libraries\(\s*(yolo_\w+)([^)]*)\))");
  bool saw_marl = false;
  for (std::sregex_iterator it(cmake.begin(), cmake.end(), block), end; it != end; ++it) {
    const std::string target = (*it)[1];
    const std::string deps = (*it)[2];
    if (target == "yolo_llmgen" || target == "yolo_harness") continue;
    saw_marl = saw_marl || target == "yolo_marl";
    EXPECT_EQ(deps.find("llmgen"), std::string::npos) << target;
  }
  EXPECT_TRUE(saw_marl);
}
