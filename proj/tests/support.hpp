#pragma once

#include <array>
#include <atomic>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "exai/facets.hpp"

namespace test_support {

inline const std::array<const char*, 30> kNames = {
    "Fantasy",  "Aesthetics",         "Feelings",          "Actions",       "Ideas",
    "Values",   "Competence",         "Order",             "Dutifulness",   "Achievement Striving",
    "Self-Discipline", "Deliberation", "Warmth",           "Gregariousness", "Assertiveness",
    "Activity", "Excitement Seeking", "Positive Emotions", "Trust",         "Straightforwardness",
    "Altruism", "Compliance",         "Modesty",           "Tender-Mindedness", "Anxiety",
    "Angry Hostility", "Depression",  "Self-Consciousness", "Impulsiveness", "Vulnerability"};

// Initial facet values of the three sample NPCs, in the order of kNames.
inline const std::array<double, 30> kSS = {20, 20, 55, 30, 20, 20, 70, 80, 50, 60, 80, 50, 55, 45, 50,
                                           50, 30, 50, 40, 70, 40, 50, 50, 50, 45, 50, 50, 50, 20, 50};
inline const std::array<double, 30> kTT = {75, 70, 75, 80, 70, 60, 50, 30, 30, 35, 25, 25, 85, 70, 40,
                                           75, 70, 80, 60, 70, 70, 50, 50, 70, 35, 30, 50, 25, 70, 40};
inline const std::array<double, 30> kAG = {30, 20, 30, 20, 20, 10, 80, 80, 90, 75, 85, 50, 40, 30, 30,
                                           50, 30, 50, 40, 70, 30, 65, 70, 25, 20, 65, 20, 45, 20, 20};

inline std::vector<std::pair<std::string, double>> assignments(const std::array<double, 30>& values) {
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.emplace_back(kNames[i], values[i]);
  return out;
}

inline exai::Personality npc(const std::string& id) {
  const auto& v = id == "SS" ? kSS : id == "TT" ? kTT : kAG;
  return exai::new_personality(id, assignments(v));
}

inline std::filesystem::path source_dir() { return EXAI_SOURCE_DIR; }

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("exai-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace test_support
