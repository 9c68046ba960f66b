#include "oocheck/prompt.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oocheck/digest.hpp"
#include "oocheck/error.hpp"
#include "oocheck/text.hpp"

namespace fs = std::filesystem;

namespace oocheck {

namespace {

std::string format_score(const std::optional<double>& value) {
  if (!value) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *value);
  return buf;
}

std::string field_or_na(const std::optional<std::string>& value) {
  if (!value) return "n/a";
  return single_line(*value);
}

void replace_all(std::string& text, std::string_view placeholder, std::string_view value) {
  size_t pos = 0;
  while ((pos = text.find(placeholder, pos)) != std::string::npos) {
    text.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::ConfigInvalid, "cannot open template " + path.string());
  }
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

PromptTemplates::Entry load_entry(const fs::path& dir, const std::string& id) {
  std::optional<fs::path> found;
  std::error_code ec;
  for (const auto& item : fs::directory_iterator(dir, ec)) {
    const std::string name = item.path().filename().string();
    if (name.rfind(id + ".", 0) == 0 && name.size() > id.size() + 5 &&
        name.substr(name.size() - 4) == ".txt") {
      if (found) {
        throw Error(Errc::ConfigInvalid,
                    "multiple template files for " + id + " in " + dir.string());
      }
      found = item.path();
    }
  }
  if (ec || !found) {
    throw Error(Errc::ConfigInvalid,
                "no template file " + id + ".<version>.txt in " + dir.string());
  }
  const std::string name = found->filename().string();
  std::string version = name.substr(id.size() + 1, name.size() - id.size() - 5);

  std::string body = read_file(*found);
  size_t sep = body.find("\n---\n");
  if (sep == std::string::npos) {
    throw Error(Errc::ConfigInvalid,
                "template " + found->string() + " lacks a '---' separator line");
  }
  PromptTemplates::Entry entry;
  entry.id = id;
  entry.version = version;
  entry.system_text = body.substr(0, sep);
  entry.user_text = body.substr(sep + 5);
  return entry;
}

}  // namespace

std::string PromptDocument::serialize() const {
  nlohmann::json doc;
  doc["system"] = system_text;
  doc["template_id"] = template_id;
  doc["template_version"] = template_version;
  auto parts_json = nlohmann::json::array();
  for (const auto& part : parts) {
    nlohmann::json p;
    p["type"] = part.type == Part::Type::Text ? "text" : "image";
    p["content"] = part.content;
    if (!part.content_sha256.empty()) {
      p["sha256"] = part.content_sha256;
    }
    parts_json.push_back(std::move(p));
  }
  doc["parts"] = std::move(parts_json);
  return doc.dump();
}

std::string PromptDocument::joined_text() const {
  std::string out;
  for (const auto& part : parts) {
    if (part.type == Part::Type::Text) {
      if (!out.empty()) out.push_back('\n');
      out += part.content;
    }
  }
  return out;
}

PromptTemplates PromptTemplates::load(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(Errc::ConfigInvalid, "templates_dir " + dir.string() + " is not a directory");
  }
  PromptTemplates t;
  t.stage1 = load_entry(dir, "stage1");
  t.stage2 = load_entry(dir, "stage2");
  return t;
}

std::string render_candidate_block(const ScoredCandidate& sc) {
  const auto& c = sc.candidate;
  std::ostringstream out;
  out << kCandidateHeaderPrefix << c.id << "\n";
  out << "domain: " << c.domain << "\n";
  out << "title: " << field_or_na(c.title) << "\n";
  out << "snippet: " << field_or_na(c.snippet) << "\n";
  out << "published_at: " << field_or_na(c.published_at) << "\n";
  if (sc.scores) {
    out << "text_sim: " << format_score(sc.scores->text_sim) << "\n";
    out << "visual_sim: " << format_score(sc.scores->visual_sim) << "\n";
  } else {
    out << "text_sim: n/a\nvisual_sim: n/a\n";
  }
  return out.str();
}

PromptDocument build_stage1_prompt(const ClaimPair& claim,
                                   const std::vector<ScoredCandidate>& ranked,
                                   const PromptTemplates& templates) {
  std::string blocks;
  if (ranked.empty()) {
    blocks = std::string(kNoEvidenceClause);
  } else {
    for (size_t i = 0; i < ranked.size(); ++i) {
      if (i > 0) blocks += "\n";
      blocks += render_candidate_block(ranked[i]);
    }
  }

  std::string user = templates.stage1.user_text;
  replace_all(user, "{{caption}}", single_line(claim.caption));
  replace_all(user, "{{candidate_count}}", std::to_string(ranked.size()));
  replace_all(user, "{{candidates}}", blocks);

  PromptDocument doc;
  doc.system_text = templates.stage1.system_text;
  doc.template_id = templates.stage1.id;
  doc.template_version = templates.stage1.version;
  doc.parts.push_back({PromptDocument::Part::Type::Text, std::move(user), ""});
  return doc;
}

PromptDocument build_stage2_prompt(const ClaimPair& claim,
                                   const Stage1Assessment& assessment,
                                   const PromptTemplates& templates,
                                   std::optional<std::string_view> image_bytes) {
  std::string digest;
  if (image_bytes) {
    digest = sha256_hex(*image_bytes);
  } else {
    digest = sha256_hex_file(claim.image_ref);
  }

  std::string stances;
  if (assessment.per_candidate.empty()) {
    stances = std::string(kNoEvidenceClause);
  } else {
    for (const auto& pc : assessment.per_candidate) {
      stances += "- " + pc.candidate_id + " [" + std::string(stance_name(pc.stance)) +
                 "] rationale: " + single_line(pc.rationale) + "\n";
    }
  }

  std::string user = templates.stage2.user_text;
  replace_all(user, "{{caption}}", single_line(claim.caption));
  replace_all(user, "{{stage1_summary}}", single_line(assessment.summary));
  replace_all(user, "{{stage1_stances}}", stances);

  constexpr std::string_view kImageMarker = "{{claim_image}}";
  size_t marker = user.find(kImageMarker);
  if (marker == std::string::npos) {
    throw Error(Errc::ConfigInvalid,
                "stage2 template lacks the {{claim_image}} placeholder");
  }

  PromptDocument doc;
  doc.system_text = templates.stage2.system_text;
  doc.template_id = templates.stage2.id;
  doc.template_version = templates.stage2.version;
  doc.parts.push_back(
      {PromptDocument::Part::Type::Text, user.substr(0, marker), ""});
  doc.parts.push_back(
      {PromptDocument::Part::Type::Image, claim.image_ref, digest});
  doc.parts.push_back({PromptDocument::Part::Type::Text,
                       user.substr(marker + kImageMarker.size()), ""});
  return doc;
}

}  // namespace oocheck
