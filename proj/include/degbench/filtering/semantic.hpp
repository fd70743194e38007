#pragma once

// Semantic prompt gate: image-text similarity from a pluggable embedder.

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "degbench/core/error.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/jsonl.hpp"
#include "degbench/core/task.hpp"
#include "degbench/filtering/verdict.hpp"

namespace degbench {

inline constexpr double kDefaultSimilarityThreshold = 0.22;

struct PromptConfig {
  std::map<TaskKind, std::string> prompts;

  std::optional<std::string_view> prompt(TaskKind t) const {
    const auto it = prompts.find(t);
    if (it == prompts.end()) return std::nullopt;
    return std::string_view(it->second);
  }
};

inline PromptConfig prompt_config_default() {
  return {{
      {TaskKind::Flare, "a photo with lens flare, bright streaks of light"},
      {TaskKind::Haze, "a hazy photo, foggy atmosphere, low contrast"},
      {TaskKind::Rain, "a rainy photo with rain streaks or raindrops"},
      {TaskKind::LowLight, "a dark photo, underexposed, low illumination"},
      {TaskKind::Blur, "a blurry photo with motion blur or out-of-focus regions"},
      {TaskKind::Reflection, "a photo with glass or mirror-like reflection artifacts"},
  }};
}

using Embedding = std::vector<double>;

/// Scales v to unit length; zero or non-finite vectors are a backend failure.
inline Embedding unit_normalized(Embedding v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  require(!v.empty() && n2 > 0.0 && std::isfinite(n2), ErrorKind::external, "embedding is empty or zero");
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : v) x *= inv;
  return v;
}

inline double cosine_similarity(const Embedding& a, const Embedding& b) {
  require(a.size() == b.size(), ErrorKind::external, "embedding dimensions differ");
  const Embedding ua = unit_normalized(a), ub = unit_normalized(b);
  double dot = 0.0;
  for (std::size_t i = 0; i < ua.size(); ++i) dot += ua[i] * ub[i];
  return std::clamp(dot, -1.0, 1.0);
}

/// Implementations are reentrant. Returned embeddings are unit-norm.
class EmbedderBackend {
 public:
  virtual ~EmbedderBackend() = default;
  virtual std::string_view name() const = 0;
  virtual Embedding embed_image(const ImageBuffer& img, std::string_view id) const = 0;
  virtual Embedding embed_text(std::string_view text) const = 0;
  virtual double similarity(const ImageBuffer& img, std::string_view id, std::string_view text) const {
    return cosine_similarity(embed_image(img, id), embed_text(text));
  }
};

/// Maps everything to the same vector, so every similarity is 1.
class NullEmbedder final : public EmbedderBackend {
 public:
  std::string_view name() const override { return "null"; }
  Embedding embed_image(const ImageBuffer&, std::string_view) const override { return {1.0}; }
  Embedding embed_text(std::string_view) const override { return {1.0}; }
};

/// Precomputed values from JSON Lines. Each line is one of
/// {id, score} (image-prompt similarity), {id, embedding} or {text, embedding}.
/// A stored score takes precedence over stored embeddings for the same id.
class FileEmbedder final : public EmbedderBackend {
 public:
  void add_score(std::string id, double score) {
    require(std::isfinite(score) && score >= -1.0 && score <= 1.0, ErrorKind::format,
            "similarity for '" + id + "' outside [-1,1]");
    scores_[std::move(id)] = score;
  }
  void add_image_embedding(std::string id, Embedding e) { images_[std::move(id)] = unit_normalized(std::move(e)); }
  void add_text_embedding(std::string text, Embedding e) { texts_[std::move(text)] = unit_normalized(std::move(e)); }

  static FileEmbedder from_jsonl(const std::filesystem::path& path) {
    FileEmbedder f;
    for_each_jsonl(path, [&](const nlohmann::json& j) {
      if (j.contains("score")) f.add_score(j.at("id").get<std::string>(), j.at("score").get<double>());
      else if (j.contains("text")) f.add_text_embedding(j.at("text").get<std::string>(), j.at("embedding").get<Embedding>());
      else f.add_image_embedding(j.at("id").get<std::string>(), j.at("embedding").get<Embedding>());
    });
    return f;
  }

  std::string_view name() const override { return "file"; }

  Embedding embed_image(const ImageBuffer&, std::string_view id) const override {
    const auto it = images_.find(std::string(id));
    if (it == images_.end()) fail(ErrorKind::external, "no stored image embedding for '" + std::string(id) + "'");
    return it->second;
  }

  Embedding embed_text(std::string_view text) const override {
    const auto it = texts_.find(std::string(text));
    if (it == texts_.end()) fail(ErrorKind::external, "no stored text embedding for '" + std::string(text) + "'");
    return it->second;
  }

  double similarity(const ImageBuffer& img, std::string_view id, std::string_view text) const override {
    const auto it = scores_.find(std::string(id));
    if (it != scores_.end()) return it->second;
    if (!images_.count(std::string(id)))
      fail(ErrorKind::external, "no stored similarity or embedding for '" + std::string(id) + "'");
    return EmbedderBackend::similarity(img, id, text);
  }

 private:
  std::map<std::string, double> scores_;
  std::map<std::string, Embedding> images_;
  std::map<std::string, Embedding> texts_;
};

/// Pass iff similarity(image, prompt(task)) >= threshold.
inline FilterVerdict semantic_filter(const ImageBuffer& img, std::string_view id, TaskKind task,
                                     const EmbedderBackend& backend, double threshold = kDefaultSimilarityThreshold,
                                     const PromptConfig& prompts = prompt_config_default()) {
  require(threshold >= -1.0 && threshold <= 1.0, ErrorKind::parameter, "similarity threshold must lie in [-1,1]");
  const auto prompt = prompts.prompt(task);
  require(prompt.has_value(), ErrorKind::config, "no semantic prompt for task " + std::string(task_name(task)));
  const double sim = backend.similarity(img, id, *prompt);
  return FilterVerdict::decide(sim >= threshold, FilterReason::low_semantic_score, {{"similarity", sim}});
}

}  // namespace degbench
