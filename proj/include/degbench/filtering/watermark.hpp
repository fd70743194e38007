#pragma once

// Watermark gate over externally produced verdicts.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "degbench/core/jsonl.hpp"
#include "degbench/filtering/verdict.hpp"

namespace degbench {

/// JSON Lines of {id, watermarked: bool}.
class WatermarkVerdicts {
 public:
  void add(std::string id, bool watermarked) { verdicts_[std::move(id)] = watermarked; }

  static WatermarkVerdicts from_jsonl(const std::filesystem::path& path) {
    WatermarkVerdicts v;
    for_each_jsonl(path, [&](const nlohmann::json& j) {
      require(j.at("watermarked").is_boolean(), ErrorKind::format, "watermarked must be a boolean");
      v.add(j.at("id").get<std::string>(), j.at("watermarked").get<bool>());
    });
    return v;
  }

  std::size_t size() const noexcept { return verdicts_.size(); }

  const bool* find(std::string_view id) const {
    const auto it = verdicts_.find(std::string(id));
    return it == verdicts_.end() ? nullptr : &it->second;
  }

 private:
  std::map<std::string, bool> verdicts_;
};

/// Pass iff the id has a verdict and it is not watermarked.
inline FilterVerdict watermark_filter(std::string_view id, const WatermarkVerdicts& verdicts) {
  const bool* w = verdicts.find(id);
  if (!w) return FilterVerdict::reject(FilterReason::external_reject, {{"verdict_present", 0.0}});
  return FilterVerdict::decide(!*w, FilterReason::watermarked, {{"verdict_present", 1.0}, {"watermarked", *w ? 1.0 : 0.0}});
}

inline FilterVerdict watermark_filter(std::string_view id, const std::filesystem::path& verdict_file) {
  return watermark_filter(id, WatermarkVerdicts::from_jsonl(verdict_file));
}

}  // namespace degbench
