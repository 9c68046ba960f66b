// Regenerates the offline fixture suite used by the acceptance tests:
// claim images, canned search responses (in cache layout), the fixture
// embedding map, the scripted reasoner rules and the dataset file.
//
//   make_fixtures --out tests/fixtures/suite
//
// Evidence image refs are written relative to the repository root, so
// benchmarks over the suite must run from there.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oocheck/cache.hpp"
#include "oocheck/digest.hpp"
#include "oocheck/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace oocheck;

namespace {

// Stage-two rule phrases; snippets carry them so the scripted reasoner can
// react to exactly the evidence that survives filtering.
constexpr const char* kPoisonNooc = "viral post confirms the caption";
constexpr const char* kPoisonOoc = "viral post reveals the caption is a lie";
constexpr const char* kTruthOoc = "originally from an unrelated event";
constexpr const char* kTruthNooc = "matches the original reporting";
constexpr const char* kGarbage = "server-error-payload";

struct EvidenceSpec {
  std::string url;
  std::string title;    // empty = absent
  std::string snippet;  // empty = absent (image-only)
  std::optional<double> text_cos;
  std::optional<double> visual_cos;  // set = record carries an image
  std::string language;              // empty = absent
  std::string published_at = "2024-05-01";
};

struct SampleSpec {
  std::string id;
  bool ooc = false;
  std::string caption;
  std::vector<EvidenceSpec> text_results;
  std::vector<EvidenceSpec> image_results;
};

std::vector<double> unit_vector(double cosine) {
  double s = std::sqrt(std::max(0.0, 1.0 - cosine * cosine));
  return {cosine, s, 0.0, 0.0};
}

void write_file(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

std::string image_bytes_for(const std::string& name) {
  std::string body = "synthetic image payload " + name + "\n";
  for (int i = 0; i < 4; ++i) {
    body += "scanline " + std::to_string(i) + " of " + name + "\n";
  }
  return body;
}

std::vector<SampleSpec> build_samples() {
  std::vector<SampleSpec> samples;

  auto truth_text = [](const std::string& sid, const char* phrase, double cos,
                       const std::string& url, const std::string& title) {
    EvidenceSpec e;
    e.url = url;
    e.title = title;
    e.snippet = "Coverage for " + sid + ": the photo " + phrase + ".";
    e.text_cos = cos;
    return e;
  };
  auto truth_image = [](const std::string& sid, const char* phrase, double vcos,
                        double tcos, const std::string& url, const std::string& title) {
    EvidenceSpec e;
    e.url = url;
    e.title = title;
    e.snippet = "Photo match for " + sid + ": this frame " + phrase + ".";
    e.text_cos = tcos;
    e.visual_cos = vcos;
    return e;
  };
  auto poison_image = [](const std::string& sid, const char* phrase, double vcos) {
    EvidenceSpec e;
    e.url = "https://viral-scoop.example/posts/" + sid;
    e.title = "SHOCKING scenes spread online (" + sid + ")";
    e.snippet = "Trending repost for " + sid + ": " + phrase + "!";
    e.text_cos = 0.65;
    e.visual_cos = vcos;
    return e;
  };

  // s01..s03: high-similarity poison from a non-allowlisted domain. The
  // domain filter is what keeps these correct.
  for (int i = 1; i <= 3; ++i) {
    SampleSpec s;
    s.id = "s0" + std::to_string(i);
    s.ooc = true;
    s.caption = std::string("Rescue crews wade through flooded streets after the dam failure") +
                " near ridge town " + std::to_string(i);
    s.text_results.push_back(truth_text(s.id, kTruthOoc, 0.85,
                                        "https://www.bbc.co.uk/news/flood-" + s.id,
                                        "Dam failure photo checked " + s.id));
    s.image_results.push_back(poison_image(s.id, kPoisonNooc, 0.95));
    s.image_results.push_back(truth_image(s.id, kTruthOoc, 0.88, 0.7,
                                          "https://www.theguardian.com/world/" + s.id,
                                          "Flood archive trace " + s.id));
    samples.push_back(std::move(s));
  }

  // s04..s05: the only decisive evidence arrives via reverse image search.
  for (int i = 4; i <= 5; ++i) {
    SampleSpec s;
    s.id = "s0" + std::to_string(i);
    s.ooc = true;
    s.caption = "Crowds celebrate a championship win downtown, photo number " +
                std::to_string(i);
    EvidenceSpec weak;
    weak.url = "https://www.usatoday.com/story/weak-" + s.id;
    weak.title = "City notebook " + s.id;
    weak.snippet = "General city news roundup unrelated to the photo " + s.id + ".";
    weak.text_cos = 0.3;
    s.text_results.push_back(weak);
    s.image_results.push_back(truth_image(s.id, kTruthOoc, 0.9, 0.72,
                                          "https://www.theguardian.com/sport/" + s.id,
                                          "Celebration photo origin " + s.id));
    samples.push_back(std::move(s));
  }

  // s06..s07: the only decisive evidence arrives via text search.
  for (int i = 6; i <= 7; ++i) {
    SampleSpec s;
    s.id = "s0" + std::to_string(i);
    s.ooc = true;
    s.caption = "Smoke rises over the harbor district after an overnight strike, image " +
                std::to_string(i);
    s.text_results.push_back(truth_text(s.id, kTruthOoc, 0.9,
                                        "https://www.bbc.co.uk/news/harbor-" + s.id,
                                        "Harbor photo fact check " + s.id));
    if (i == 6) {
      EvidenceSpec weak;
      weak.url = "https://www.washingtonpost.com/archive/" + s.id;
      weak.title = "Archival street scene " + s.id;
      weak.snippet = "Archival street scene with no event context " + s.id + ".";
      weak.text_cos = 0.2;
      weak.visual_cos = 0.2;
      s.image_results.push_back(weak);
    }
    samples.push_back(std::move(s));
  }

  // s08..s12: straightforward out-of-context pairs with trusted evidence.
  {
    SampleSpec s;
    s.id = "s08";
    s.ooc = true;
    s.caption = "Wildfire front approaches hillside homes at dusk";
    s.text_results.push_back(truth_text(s.id, kTruthOoc, 0.82,
                                        "https://www.bbc.co.uk/news/fire-" + s.id,
                                        "Hillside fire verified " + s.id));
    s.image_results.push_back(truth_image(s.id, kTruthOoc, 0.86, 0.6,
                                          "https://www.theguardian.com/env/" + s.id,
                                          "City Fire Archive: Hillside!"));
    EvidenceSpec dup = s.image_results.back();
    dup.title = "city fire archive hillside";  // same domain-title after normalization
    dup.snippet = "Duplicate syndication of the hillside fire photo " + s.id + ".";
    dup.text_cos = 0.5;
    dup.visual_cos = 0.8;
    s.image_results.push_back(dup);
    samples.push_back(std::move(s));
  }
  {
    SampleSpec s;
    s.id = "s09";
    s.ooc = true;
    s.caption = "Protesters fill the central avenue demanding election rerun";
    s.text_results.push_back(truth_text(s.id, kTruthOoc, 0.88,
                                        "https://www.bbc.co.uk/news/protest-" + s.id,
                                        "Protest photo provenance " + s.id));
    EvidenceSpec fr;
    fr.url = "https://www.bbc.co.uk/afrique/" + s.id;
    fr.title = "Manifestation en ville " + s.id;
    fr.snippet = "Les manifestants remplissent l'avenue centrale " + s.id + ".";
    fr.text_cos = 0.8;
    fr.language = "fr";
    s.text_results.push_back(fr);
    samples.push_back(std::move(s));
  }
  {
    SampleSpec s;
    s.id = "s10";
    s.ooc = true;
    s.caption = "Icebreaker clears a path for stranded ferries in the strait";
    s.text_results.push_back(truth_text(s.id, kTruthOoc, 0.84,
                                        "https://www.theguardian.com/world/ice-" + s.id,
                                        "Icebreaker photo checked " + s.id));
    EvidenceSpec image_only;
    image_only.url = "https://www.washingtonpost.com/photos/" + s.id;
    image_only.visual_cos = 0.75;
    s.image_results.push_back(image_only);
    s.image_results.push_back(truth_image(s.id, kTruthOoc, 0.83, 0.55,
                                          "https://www.bbc.co.uk/news/ice-" + s.id,
                                          "Strait ice archive " + s.id));
    samples.push_back(std::move(s));
  }
  {
    SampleSpec s;
    s.id = "s11";
    s.ooc = true;
    s.caption = "Volunteers sandbag the riverbank as the crest nears";
    s.text_results.push_back(truth_text(s.id, kTruthOoc, 0.9,
                                        "https://www.washingtonpost.com/nation/" + s.id,
                                        "Riverbank photo research " + s.id));
    s.image_results.push_back(truth_image(s.id, kTruthOoc, 0.89, 0.62,
                                          "https://www.usatoday.com/story/river-" + s.id,
                                          "River crest image trail " + s.id));
    samples.push_back(std::move(s));
  }
  {
    SampleSpec s;
    s.id = "s12";
    s.ooc = true;
    s.caption = "New high-speed rail platform opens to commuters at dawn";
    s.text_results.push_back(truth_text(s.id, kTruthOoc, 0.78,
                                        "https://www.usatoday.com/story/rail-" + s.id,
                                        "Rail platform photo notes " + s.id));
    samples.push_back(std::move(s));
  }

  // s13: evidence that drives the scripted reasoner into returning garbage
  // twice; the sample must land as an error row, not a verdict.
  {
    SampleSpec s;
    s.id = "s13";
    s.ooc = false;
    s.caption = "Mayor inaugurates the refurbished central library reading room";
    EvidenceSpec t;
    t.url = "https://www.usatoday.com/story/library-" + s.id;
    t.title = "Library reopening " + s.id;
    t.snippet = std::string("Diagnostics blob ") + kGarbage + " text " + s.id + ".";
    t.text_cos = 0.8;
    s.text_results.push_back(t);
    EvidenceSpec v = t;
    v.url = "https://www.bbc.co.uk/news/library-" + s.id;
    v.title = "Library reopening photo " + s.id;
    v.snippet = std::string("Diagnostics blob ") + kGarbage + " image " + s.id + ".";
    v.visual_cos = 0.85;
    s.image_results.push_back(v);
    samples.push_back(std::move(s));
  }

  // s14..s23: correctly contextualized pairs backed by trusted outlets.
  auto nooc_sample = [&](const std::string& sid, const std::string& caption) {
    SampleSpec s;
    s.id = sid;
    s.ooc = false;
    s.caption = caption;
    return s;
  };
  {
    auto s = nooc_sample("s14", "Farmers harvest the early wheat crop under clear skies");
    s.text_results.push_back(truth_text(s.id, kTruthNooc, 0.85,
                                        "https://www.bbc.co.uk/news/harvest-" + s.id,
                                        "Harvest photo confirmed " + s.id));
    s.image_results.push_back(truth_image(s.id, kTruthNooc, 0.9, 0.7,
                                          "https://www.theguardian.com/env/harvest-" + s.id,
                                          "Wheat harvest image " + s.id));
    samples.push_back(std::move(s));
  }
  {
    auto s = nooc_sample("s15", "Night market vendors light lanterns for the festival");
    s.image_results.push_back(truth_image(s.id, kTruthNooc, 0.92, 0.68,
                                          "https://www.bbc.co.uk/news/festival-" + s.id,
                                          "Festival photo confirmed " + s.id));
    samples.push_back(std::move(s));
  }
  {
    auto s = nooc_sample("s16", "Students return to the rebuilt schoolhouse after repairs");
    s.text_results.push_back(truth_text(s.id, kTruthNooc, 0.8,
                                        "https://www.theguardian.com/education/" + s.id,
                                        "Schoolhouse reopening " + s.id));
    samples.push_back(std::move(s));
  }
  {
    auto s = nooc_sample("s17", "Clinic staff administer flu vaccines at the mobile unit");
    s.text_results.push_back(truth_text(s.id, kTruthNooc, 0.82,
                                        "https://www.usatoday.com/story/clinic-" + s.id,
                                        "Clinic photo coverage " + s.id));
    s.image_results.push_back(truth_image(s.id, kTruthNooc, 0.85, 0.66,
                                          "https://www.washingtonpost.com/health/" + s.id,
                                          "Vaccine drive image " + s.id));
    samples.push_back(std::move(s));
  }
  {
    auto s = nooc_sample("s18", "Engineers inspect the suspension bridge cables at sunrise");
    s.text_results.push_back(truth_text(s.id, kTruthNooc, 0.75,
                                        "https://www.washingtonpost.com/local/" + s.id,
                                        "Bridge inspection notes " + s.id));
    s.image_results.push_back(truth_image(s.id, kTruthNooc, 0.8, 0.58,
                                          "https://www.usatoday.com/story/bridge-" + s.id,
                                          "Bridge cable photo " + s.id));
    samples.push_back(std::move(s));
  }
  {
    // Poison pushing the other way: only the domain filter keeps this right.
    auto s = nooc_sample("s19", "Council opens the new riverside cycling path");
    s.text_results.push_back(truth_text(s.id, kTruthNooc, 0.9,
                                        "https://www.bbc.co.uk/news/cycling-" + s.id,
                                        "Cycling path opening " + s.id));
    EvidenceSpec p;
    p.url = "https://viral-scoop.example/posts/" + s.id;
    p.title = "They are hiding this photo (" + s.id + ")";
    p.snippet = std::string("Trending expose for ") + s.id + ": " + kPoisonOoc + "!";
    p.text_cos = 0.6;
    p.visual_cos = 0.93;
    s.image_results.push_back(p);
    samples.push_back(std::move(s));
  }
  {
    auto s = nooc_sample("s20", "Ski patrol rescues a stranded snowboarder near the summit");
    s.text_results.push_back(truth_text(s.id, kTruthNooc, 0.88,
                                        "https://www.theguardian.com/sport/ski-" + s.id,
                                        "Summit rescue report " + s.id));
    EvidenceSpec neutral;
    neutral.url = "https://www.theguardian.com/sport/ski-roundup-" + s.id;
    neutral.title = "Mountain sports roundup " + s.id;
    neutral.snippet = "Weekly mountain sports roundup " + s.id + ".";
    neutral.text_cos = 0.45;
    neutral.visual_cos = 0.87;
    s.image_results.push_back(neutral);
    samples.push_back(std::move(s));
  }
  {
    // Borderline visual band: text similarity reorders within the band.
    auto s = nooc_sample("s21", "Chefs plate the tasting menu at the harvest gala");
    s.text_results.push_back(truth_text(s.id, kTruthNooc, 0.79,
                                        "https://www.bbc.co.uk/news/gala-" + s.id,
                                        "Gala dinner coverage " + s.id));
    EvidenceSpec v1;
    v1.url = "https://www.usatoday.com/story/gala-" + s.id;
    v1.title = "Gala kitchen photo " + s.id;
    v1.snippet = "Kitchen pass during the gala service " + s.id + " " +
                 std::string(kTruthNooc) + ".";
    v1.text_cos = 0.6;
    v1.visual_cos = 0.851;
    EvidenceSpec v2;
    v2.url = "https://www.bbc.co.uk/news/gala-photo-" + s.id;
    v2.title = "Gala plating photo " + s.id;
    v2.snippet = "Plating detail from the same gala service " + s.id + ".";
    v2.text_cos = 0.9;
    v2.visual_cos = 0.845;
    s.image_results.push_back(v1);
    s.image_results.push_back(v2);
    samples.push_back(std::move(s));
  }
  {
    auto s = nooc_sample("s22", "Archivists unveil restored frescoes in the old chapel");
    s.text_results.push_back(truth_text(s.id, kTruthNooc, 0.86,
                                        "https://www.washingtonpost.com/arts/" + s.id,
                                        "Fresco restoration story " + s.id));
    samples.push_back(std::move(s));
  }
  {
    auto s = nooc_sample("s23", "Sailors furl the mainsail as the regatta fleet docks");
    s.image_results.push_back(truth_image(s.id, kTruthNooc, 0.9, 0.64,
                                          "https://www.washingtonpost.com/sports/" + s.id,
                                          "Regatta finish photo " + s.id));
    EvidenceSpec extra;
    extra.url = "https://www.theguardian.com/sport/regatta-" + s.id;
    extra.title = "Regatta weekend gallery " + s.id;
    extra.snippet = "Gallery of regatta weekend moments " + s.id + ".";
    extra.text_cos = 0.5;
    extra.visual_cos = 0.72;
    s.image_results.push_back(extra);
    samples.push_back(std::move(s));
  }
  {
    // Every candidate sits below the similarity threshold.
    auto s = nooc_sample("s24", "Morning fog settles over the vineyard terraces");
    EvidenceSpec t;
    t.url = "https://www.usatoday.com/story/fog-" + s.id;
    t.title = "Weather notebook " + s.id;
    t.snippet = "Regional weather notebook " + s.id + ".";
    t.text_cos = 0.4;
    s.text_results.push_back(t);
    EvidenceSpec v;
    v.url = "https://www.bbc.co.uk/news/fog-" + s.id;
    v.title = "Fog gallery " + s.id;
    v.snippet = "Seasonal fog photo gallery " + s.id + ".";
    v.text_cos = 0.35;
    v.visual_cos = 0.5;
    s.image_results.push_back(v);
    samples.push_back(std::move(s));
  }
  {
    // No evidence at all: the reasoner must still decide.
    auto s = nooc_sample("s25", "Lighthouse keepers repaint the lantern room railings");
    samples.push_back(std::move(s));
  }
  return samples;
}

json record_to_json(const EvidenceSpec& e, const std::string& image_ref) {
  json r;
  r["url"] = e.url;
  if (!e.title.empty()) r["title"] = e.title;
  if (!e.snippet.empty()) r["snippet"] = e.snippet;
  if (!image_ref.empty()) r["image_url"] = image_ref;
  if (!e.language.empty()) r["language"] = e.language;
  r["published_at"] = e.published_at;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regenerate the offline fixture suite"};
  std::string out_dir = "tests/fixtures/suite";
  app.add_option("--out", out_dir, "Output directory (repo-root relative)");
  CLI11_PARSE(app, argc, argv);

  fs::path out(out_dir);
  fs::remove_all(out);
  fs::create_directories(out);

  auto samples = build_samples();

  json text_embeddings = json::object();
  json image_embeddings = json::object();

  // Claim images and caption embeddings: every claim sits at the reference
  // direction so evidence cosines equal the designed values.
  std::ofstream dataset(out / "dataset.jsonl", std::ios::trunc);
  for (const auto& s : samples) {
    std::string bytes = image_bytes_for("claim-" + s.id);
    write_file(out / "images" / "claims" / (s.id + ".img"), bytes);
    image_embeddings[sha256_hex(bytes)] = unit_vector(1.0);
    text_embeddings[normalize_whitespace(s.caption)] = unit_vector(1.0);

    json row;
    row["id"] = s.id;
    row["image_path"] = "images/claims/" + s.id + ".img";
    row["caption"] = s.caption;
    row["ooc"] = s.ooc;
    dataset << row.dump() << "\n";
  }
  dataset.close();

  // Search responses live in cache layout keyed exactly like live requests.
  FileCache search_store(out / "search");
  const std::string text_provider = "fix-text-search";
  const std::string image_provider = "fix-image-search";

  for (const auto& s : samples) {
    int image_index = 0;
    auto materialize = [&](const std::vector<EvidenceSpec>& specs) {
      json records = json::array();
      for (const auto& e : specs) {
        std::string image_ref;
        if (e.visual_cos) {
          std::string name = s.id + "-e" + std::to_string(++image_index);
          std::string bytes = image_bytes_for("evidence-" + name);
          write_file(out / "images" / "evidence" / (name + ".img"), bytes);
          image_embeddings[sha256_hex(bytes)] = unit_vector(*e.visual_cos);
          image_ref = (out / "images" / "evidence" / (name + ".img")).generic_string();
        }
        if (!e.snippet.empty() && e.text_cos) {
          text_embeddings[normalize_whitespace(e.snippet)] = unit_vector(*e.text_cos);
        }
        records.push_back(record_to_json(e, image_ref));
      }
      json body;
      body["records"] = std::move(records);
      return body.dump(2) + "\n";
    };

    std::string claim_bytes = image_bytes_for("claim-" + s.id);
    RetrievalRequest text_req{RequestKind::TextQuery, normalize_whitespace(s.caption), 1};
    search_store.put(make_cache_key(text_req, text_provider), materialize(s.text_results));
    RetrievalRequest image_req{RequestKind::ReverseImage, sha256_hex(claim_bytes), 1};
    search_store.put(make_cache_key(image_req, image_provider),
                     materialize(s.image_results));
  }

  json embeddings;
  embeddings["dim"] = 4;
  embeddings["text"] = std::move(text_embeddings);
  embeddings["image"] = std::move(image_embeddings);
  write_file(out / "embeddings.json", embeddings.dump(2) + "\n");

  // Scripted reasoner: stage-one stances quote the snippet; stage-two rules
  // react to the phrases that survived filtering. Rule order is precedence.
  json reasoner;
  reasoner["stage1"] = {
      {"stance_rules",
       json::array({{{"contains", kPoisonNooc}, {"stance", "supports"}},
                    {{"contains", kPoisonOoc}, {"stance", "refutes"}},
                    {{"contains", kTruthOoc}, {"stance", "refutes"}},
                    {{"contains", kTruthNooc}, {"stance", "supports"}},
                    {{"contains", kGarbage}, {"stance", "irrelevant"}}})},
      {"default_stance", "irrelevant"}};
  reasoner["stage2"] = {
      {"rules",
       json::array(
           {{{"contains", kGarbage},
             {"respond_raw", "SERVER ERROR: upstream timeout while composing the answer"}},
            {{"contains", kPoisonNooc},
             {"label", "NOOC"},
             {"confidence", 8},
             {"explanation", "Matching viral coverage confirms the caption's framing."}},
            {{"contains", kPoisonOoc},
             {"label", "OOC"},
             {"confidence", 8},
             {"explanation", "Viral coverage says the caption misuses this photo."}},
            {{"contains", kTruthOoc},
             {"label", "OOC"},
             {"confidence", 9},
             {"explanation",
              "Trusted coverage shows the image comes from a different event than the "
              "caption claims."}},
            {{"contains", kTruthNooc},
             {"label", "NOOC"},
             {"confidence", 9},
             {"explanation", "Trusted coverage matches the caption's account of the image."}}})},
      {"default",
       {{"label", "NOOC"},
        {"confidence", 3},
        {"explanation",
         "No decisive external evidence; direct image reading does not contradict the "
         "caption."}}}};
  write_file(out / "reasoner.json", reasoner.dump(2) + "\n");

  json config;
  config["providers"] = {
      {"text_search", {{"kind", "fixture"}, {"id", text_provider}, {"path", "search"}}},
      {"image_search", {{"kind", "fixture"}, {"id", image_provider}, {"path", "search"}}},
      {"text_embedding",
       {{"kind", "fixture"}, {"id", "fix-embed"}, {"path", "embeddings.json"}}},
      {"image_embedding",
       {{"kind", "fixture"}, {"id", "fix-embed"}, {"path", "embeddings.json"}}},
      {"stage1_chat",
       {{"kind", "scripted"}, {"id", "scripted-mllm"}, {"path", "reasoner.json"}}}};
  config["templates_dir"] = "../../../templates";
  write_file(out / "config.json", config.dump(2) + "\n");

  std::cout << "fixture suite written to " << out.string() << " (" << samples.size()
            << " samples)\n";
  return 0;
}
