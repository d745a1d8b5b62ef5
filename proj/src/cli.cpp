#include "hardneg/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <ostream>

#include "hardneg/bundle.hpp"
#include "hardneg/checkpoint.hpp"
#include "hardneg/encoder.hpp"
#include "hardneg/error.hpp"
#include "hardneg/fine_similarity.hpp"
#include "hardneg/generation.hpp"
#include "hardneg/hardness.hpp"
#include "hardneg/importance.hpp"
#include "hardneg/remote.hpp"
#include "hardneg/toy_bench.hpp"

namespace hardneg::cli {

namespace {

// Raised for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 12 significant digits hides last-ulp noise; integral values keep ".0".
std::string format_real(double v) {
  std::string s = fmt::format("{:.12g}", v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigurationError("cannot write '" + path + "'");
  f << text;
  if (!f) throw ConfigurationError("write to '" + path + "' failed");
}

struct GenerateArgs {
  std::string in, out, components = "verb,adjective_adverb,subject,object,negated_passive";
  std::string backend = "fallback", lexicon, catalog, endpoint, model = "gpt-3.5-turbo";
  bool no_fallback = false;
  std::size_t parallelism = 4;
};

int do_generate(const GenerateArgs& a, std::ostream& out) {
  const auto components = parse_component_list(a.components);
  const PromptCatalog catalog = a.catalog.empty() ? PromptCatalog::builtin() : PromptCatalog::load(a.catalog);
  const Lexicon lexicon = a.lexicon.empty() ? Lexicon::demo() : Lexicon::load(a.lexicon);
  std::unique_ptr<GenerationBackend> llm;
  if (a.backend == "llm") {
    if (a.endpoint.empty()) throw UsageError("--backend llm requires --endpoint");
    llm = std::make_unique<RemoteLlmBackend>(RemoteEndpoint{a.endpoint, a.model, api_key_from_env()});
  } else if (a.no_fallback) {
    throw UsageError("--no-fallback only applies to --backend llm");
  }
  const SampleForge forge(catalog, llm.get(), a.no_fallback ? nullptr : &lexicon);
  const auto captions = load_captions(a.in);
  const auto bundles = forge.generate_all(captions, components, a.parallelism);
  std::filesystem::remove(a.out);
  BundleAppender appender(a.out);
  for (const TextBundle& b : bundles) appender.append(b);
  out << bundles.size() << " bundles written to " << a.out << "\n";
  return kExitOk;
}

struct EncoderArgs {
  std::string backend = "toy-encoder", endpoint, model = "text-embedding";
  Eigen::Index dim = 16;
  std::uint64_t seed = 0;
};

std::unique_ptr<EncoderBackend> make_encoder(const EncoderArgs& a) {
  if (a.backend == "toy-encoder") return std::make_unique<ToyEncoder>(a.dim, a.seed);
  if (a.endpoint.empty()) throw UsageError("--backend remote requires --endpoint");
  return std::make_unique<RemoteEncoder>(RemoteEndpoint{a.endpoint, a.model, ""}, a.dim);
}

struct ValidateArgs {
  std::string in, out, cache;
  EncoderArgs enc;
};

int do_validate(const ValidateArgs& a, std::ostream& out) {
  const auto encoder = make_encoder(a.enc);
  EmbeddingCache cache = a.cache.empty() ? EmbeddingCache{} : EmbeddingCache::load(a.cache);
  const CachedEncoder cached(*encoder, cache);
  const EncoderBackend& use = a.cache.empty() ? *encoder : static_cast<const EncoderBackend&>(cached);

  std::string report;
  for (const TextBundle& b : load_bundles(a.in)) {
    const HardnessReport r = validate_hardness(b, use);
    nlohmann::ordered_json j;
    j["id"] = b.id;
    j["sim_anchor_positive"] = r.sim_anchor_positive;
    nlohmann::ordered_json neg = nlohmann::ordered_json::object(), hard = nlohmann::ordered_json::object();
    for (const auto& [c, s] : r.sim_anchor_negative) neg[std::string(component_tag(c))] = s;
    for (const auto& [c, h] : r.hard) hard[std::string(component_tag(c))] = h;
    j["sim_anchor_negative"] = std::move(neg);
    j["hard"] = std::move(hard);
    report += j.dump() + "\n";
  }
  if (!a.cache.empty()) cache.save(a.cache);
  if (a.out.empty()) {
    out << report;
  } else {
    write_text(a.out, report);
  }
  return kExitOk;
}

struct SimscoreArgs {
  std::string a, b;
  double tau = kDefaultTau;
  bool sides = false;
  EncoderArgs enc;
};

int do_simscore(const SimscoreArgs& s, std::ostream& out) {
  const auto encoder = make_encoder(s.enc);
  const PairScore p = pair_score(encoder->embed_tokens(s.a), encoder->embed_tokens(s.b), s.tau);
  if (s.sides) out << format_real(p.side_a) << " " << format_real(p.side_b) << " ";
  out << format_real(p.final) << "\n";
  return kExitOk;
}

struct ImportanceArgs {
  std::string in, checkpoint;
  Eigen::Index dim = 16, h = 8;
  std::uint64_t seed = 0, encoder_seed = 0;
};

int do_importance(const ImportanceArgs& a, std::ostream& out) {
  ImportanceParams params;
  Eigen::Index dim = a.dim;
  std::uint64_t enc_seed = a.encoder_seed;
  if (!a.checkpoint.empty()) {
    const Checkpoint ck = load_checkpoint(a.checkpoint);
    params = get_importance(ck);
    dim = params.dim();
    if (auto it = ck.meta.find("encoder-seed"); it != ck.meta.end()) enc_seed = std::stoull(it->second);
  } else {
    params = init_importance_params(a.dim, a.h, a.seed);
  }
  const ToyEncoder enc(dim, enc_seed);
  for (const TextBundle& b : load_bundles(a.in)) {
    std::vector<TokenMatrix> negs;
    std::vector<std::string> tags;
    for (ComponentKind c : b.applicable_components()) {
      negs.push_back(enc.embed_tokens(b.negatives.at(c)));
      tags.emplace_back(component_tag(c));
    }
    nlohmann::ordered_json j;
    j["id"] = b.id;
    j["components"] = tags;
    if (negs.empty()) {
      j["omega"] = nlohmann::json::array();
    } else {
      const ImportanceWeights w = estimate_weights(enc.embed_sentence(b.anchor), negs, params);
      j["logits"] = std::vector<double>(w.logits.data(), w.logits.data() + w.logits.size());
      j["omega"] = std::vector<double>(w.omega.data(), w.omega.data() + w.omega.size());
    }
    out << j.dump() << "\n";
  }
  return kExitOk;
}

int do_train(const TrainConfig& config, const std::string& out_dir, std::ostream& out) {
  std::filesystem::create_directories(out_dir);
  const auto data = make_dataset(config.dataset_seed, config.n, Vocab::demo(), config.dataset_options());
  const TrainReport report = train(config, data);
  const std::filesystem::path dir(out_dir);
  save_checkpoint((dir / "initial.ckpt").string(), report.initial);
  save_checkpoint((dir / "final.ckpt").string(), report.final);
  std::string losses;
  for (const LossRecord& r : report.losses) losses += loss_record_to_json(r) + "\n";
  write_text((dir / "losses.jsonl").string(), losses);
  const RetrievalMetrics m =
      eval_retrieval(report.final, data, data.size() >= 5 ? std::vector<int>{1, 5} : std::vector<int>{1});
  const std::string metrics = metrics_to_json(m, config.mode, config.seed);
  write_text((dir / "metrics.json").string(), metrics + "\n");
  out << metrics << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string checkpoint, out;
  std::optional<std::uint64_t> dataset_seed;
  std::optional<std::size_t> n;
};

int do_eval(const EvalArgs& a, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  std::vector<ToySample> data;
  if (a.dataset_seed || a.n) {
    TrainConfig c;
    for (const char* key : {"dataset-seed", "n", "dim", "encoder-seed", "noise"}) {
      auto it = ck.meta.find(key);
      if (it == ck.meta.end()) throw IntegrityError(std::string("checkpoint lacks meta '") + key + "'");
      apply_setting(c, key, it->second);
    }
    if (a.dataset_seed) c.dataset_seed = *a.dataset_seed;
    if (a.n) c.n = *a.n;
    data = make_dataset(c.dataset_seed, c.n, Vocab::demo(), c.dataset_options());
  } else {
    data = dataset_for(ck);
  }
  const std::vector<int> ks = data.size() >= 5 ? std::vector<int>{1, 5} : std::vector<int>{1};
  const RetrievalMetrics m = eval_retrieval(ck, data, ks);
  auto get = [&](const char* key, const char* dflt) {
    auto it = ck.meta.find(key);
    return it == ck.meta.end() ? std::string(dflt) : it->second;
  };
  const std::string json = metrics_to_json(m, parse_train_mode(get("mode", "baseline")), std::stoull(get("seed", "0")));
  if (a.out.empty()) {
    out << json << "\n";
  } else {
    write_text(a.out, json + "\n");
  }
  return kExitOk;
}

struct ShiftArgs {
  std::string before, after, out, summary;
  std::size_t bins = 20;
};

int do_shift(const ShiftArgs& a, std::ostream& out) {
  const Checkpoint before = load_checkpoint(a.before);
  const Checkpoint after = load_checkpoint(a.after);
  const auto data = dataset_for(before);
  const ShiftReport r = shift_report(before, after, data, a.bins);
  if (a.out.empty()) {
    out << histogram_jsonl(r);
  } else {
    write_text(a.out, histogram_jsonl(r));
  }
  const std::string summary = shift_summary_json(r);
  if (!a.summary.empty()) {
    write_text(a.summary, summary + "\n");
  } else if (!a.out.empty()) {
    out << summary << "\n";
  }
  return kExitOk;
}

void add_encoder_flags(CLI::App* sub, EncoderArgs& e) {
  sub->add_option("--backend", e.backend, "Encoder backend")->check(CLI::IsMember({"toy-encoder", "remote"}));
  sub->add_option("--endpoint", e.endpoint, "Remote encoder URL");
  sub->add_option("--model", e.model, "Remote encoder model name");
  sub->add_option("--dim", e.dim, "Embedding dimension")->check(CLI::PositiveNumber);
  sub->add_option("--seed", e.seed, "Toy encoder seed");
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Component-targeted hard negatives, importance-weighted contrastive losses, toy benchmark", "hardneg"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate negative/positive bundles for captions");
  generate->add_option("--in", gen.in, "Captions file (JSON lines)")->required();
  generate->add_option("--out", gen.out, "Bundle file to write")->required();
  generate->add_option("--components", gen.components, "Comma-separated component tags");
  generate->add_option("--backend", gen.backend, "llm or fallback")->check(CLI::IsMember({"llm", "fallback"}));
  generate->add_option("--lexicon", gen.lexicon, "Lexicon file (default: built-in demo lexicon)");
  generate->add_option("--catalog", gen.catalog, "Prompt catalog file (default: built-in)");
  generate->add_option("--endpoint", gen.endpoint, "Chat completion URL for --backend llm");
  generate->add_option("--model", gen.model, "Model name for --backend llm");
  generate->add_flag("--no-fallback", gen.no_fallback, "Fail instead of using the lexicon fallback");
  generate->add_option("--parallelism", gen.parallelism, "Requests in flight")->check(CLI::PositiveNumber);

  ValidateArgs val;
  auto* validate_cmd = app.add_subcommand("validate", "Report whether generated negatives are hard");
  validate_cmd->add_option("--in", val.in, "Bundle file")->required();
  validate_cmd->add_option("--out", val.out, "Report file (default: stdout)");
  validate_cmd->add_option("--cache", val.cache, "Embedding cache file");
  add_encoder_flags(validate_cmd, val.enc);

  SimscoreArgs sim;
  auto* simscore = app.add_subcommand("simscore", "Fine-grained similarity of two texts");
  simscore->add_option("--a", sim.a, "First text")->required();
  simscore->add_option("--b", sim.b, "Second text")->required();
  simscore->add_option("--tau", sim.tau, "Softmax temperature")->check(CLI::PositiveNumber);
  simscore->add_flag("--sides", sim.sides, "Also print both side scores");
  add_encoder_flags(simscore, sim.enc);

  ImportanceArgs imp;
  auto* importance = app.add_subcommand("importance", "Importance weights for each bundle's negatives");
  importance->add_option("--in", imp.in, "Bundle file")->required();
  importance->add_option("--checkpoint", imp.checkpoint, "Trained checkpoint (default: fresh init)");
  importance->add_option("--dim", imp.dim, "Embedding dimension")->check(CLI::PositiveNumber);
  importance->add_option("--hidden", imp.h, "Hidden dimension")->check(CLI::PositiveNumber);
  importance->add_option("--seed", imp.seed, "Parameter init seed");
  importance->add_option("--encoder-seed", imp.encoder_seed, "Toy encoder seed");

  std::string config_path, out_dir;
  std::map<std::string, std::string> overrides;
  auto* train_cmd = app.add_subcommand("train", "Train on the synthetic benchmark");
  train_cmd->add_option("--config", config_path, "Config file of key = value lines");
  train_cmd->add_option("--out-dir", out_dir, "Directory for checkpoints, losses and metrics")->required();
  // Flags mirror config keys, except the hidden size: -h belongs to help.
  for (const char* key : {"mode", "seed", "epochs", "lr", "tau", "lambda", "dim", "h", "dataset-seed", "n",
                          "batch-size", "noise", "encoder-seed", "components", "variant"}) {
    const std::string flag = std::string(key) == "h" ? "--hidden" : std::string("--") + key;
    train_cmd->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides[key] = v; },
        std::string("Config key '") + key + "'");
  }

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Retrieval metrics for a checkpoint");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--out", ev.out, "Metrics file (default: stdout)");
  eval_cmd->add_option("--dataset-seed", ev.dataset_seed, "Evaluate on another dataset seed");
  eval_cmd->add_option("--n", ev.n, "Evaluate on another dataset size")->check(CLI::PositiveNumber);

  ShiftArgs sh;
  auto* shift_cmd = app.add_subcommand("shift-report", "Similarity distribution shift between checkpoints");
  shift_cmd->add_option("--before", sh.before, "Checkpoint before training")->required();
  shift_cmd->add_option("--after", sh.after, "Checkpoint after training")->required();
  shift_cmd->add_option("--out", sh.out, "Histogram file (default: stdout)");
  shift_cmd->add_option("--summary", sh.summary, "Summary statistics file");
  shift_cmd->add_option("--bins", sh.bins, "Histogram bins")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  auto usage = [&](const std::string& what) {
    err << "error: " << what << "\n";
    CLI::App* active = &app;
    for (CLI::App* s : app.get_subcommands()) active = s;
    err << active->help();
    return kExitUsage;
  };

  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    CLI::App* active = &app;
    for (CLI::App* s : app.get_subcommands()) active = s;
    out << active->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return usage(e.what());
  }

  TrainConfig config;
  if (train_cmd->parsed()) {
    try {
      if (!config_path.empty()) config = load_train_config(config_path);
      for (const auto& [k, v] : overrides) apply_setting(config, k, v);
    } catch (const ParseError& e) {
      err << "error: " << e.what() << "\n";
      return kExitDomain;
    } catch (const ConfigurationError& e) {
      err << "error: " << e.what() << "\n";
      return kExitDomain;
    } catch (const Error& e) {
      return usage(e.what());
    }
  }

  try {
    if (generate->parsed()) return do_generate(gen, out);
    if (validate_cmd->parsed()) return do_validate(val, out);
    if (simscore->parsed()) return do_simscore(sim, out);
    if (importance->parsed()) return do_importance(imp, out);
    if (train_cmd->parsed()) return do_train(config, out_dir, out);
    if (eval_cmd->parsed()) return do_eval(ev, out);
    if (shift_cmd->parsed()) return do_shift(sh, out);
  } catch (const UsageError& e) {
    return usage(e.what());
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return usage("no subcommand");
}

}  // namespace hardneg::cli
