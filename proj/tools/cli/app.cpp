#include "app.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "rrg/errors.hpp"

namespace rrg::cli {

namespace {

void report(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  Json j;
  j["error"] = kind;
  j["message"] = message;
  j["exit_code"] = code;
  err << j.dump() << '\n';
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rrg: numerical experiments with random Riemannian metrics on the plane", "rrg"};
  app.set_version_flag("--version", std::string(version()));
  std::string config_path, out_dir = "rrg-out", format = "csv";
  std::optional<std::uint64_t> seed_flag;
  std::optional<int> threads_flag;
  app.add_option("--config", config_path, "INI file with [run], [field], [grid] and per-command sections")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed_flag, "master seed (overrides RRG_SEED and run.seed)");
  app.add_option("--threads", threads_flag, "worker threads (overrides RRG_THREADS and run.threads)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "curve format")->check(CLI::IsMember({"ndjson", "csv"}));
  app.require_subcommand(1);
  for (const auto& c : commands()) app.add_subcommand(c.name, c.help)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return kOk;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    report(err, "UsageError", e.what(), kConfigError);
    return kConfigError;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const CommandInfo* info = nullptr;
  for (const auto& c : commands())
    if (sub->get_name() == c.name) info = &c;

  Context ctx;
  ctx.command = info->name;
  try {
    if (!config_path.empty()) ctx.config = Config::from_file(config_path);
    ctx.seed = ctx.config.get_u64("run.seed", 1);
    if (const auto e = env("RRG_SEED")) ctx.seed = Config::from_string("[run]\nseed=" + *e).get_u64("run.seed", 1);
    if (seed_flag) ctx.seed = *seed_flag;
    ctx.threads = static_cast<int>(ctx.config.get_int("run.threads", 1));
    if (const auto e = env("RRG_THREADS")) ctx.threads = static_cast<int>(Config::from_string("[run]\nthreads=" + *e).get_int("run.threads", 1));
    if (threads_flag) ctx.threads = *threads_flag;
    if (ctx.threads < 1) throw ConfigError("thread count must be positive");
  } catch (const ConfigError& e) {
    report(err, "ConfigError", e.what(), kConfigError);
    return kConfigError;
  }

  const auto start = std::chrono::steady_clock::now();
  Manifest m;
  m.command = ctx.command;
  m.seed = ctx.seed;
  m.threads = ctx.threads;
  m.config_hash = hex64(fnv1a(ctx.config.canonical()));
  int code = kOk;
  try {
    Sink sink(out_dir, ctx.command, format == "csv" ? Format::Csv : Format::Ndjson);
    ctx.sink = &sink;
    code = info->fn(ctx);
    m.extra["records"] = sink.records();
  } catch (const ConfigError& e) {
    report(err, "ConfigError", e.what(), kConfigError);
    code = kConfigError;
  } catch (const Error& e) {
    report(err, e.kind(), e.what(), kNumericFailure);
    code = kNumericFailure;
  } catch (const std::exception& e) {
    report(err, "InternalError", e.what(), kNumericFailure);
    code = kNumericFailure;
  }
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.exit_code = code;
  for (const auto& [k, v] : ctx.summary.items()) m.extra[k] = v;
  std::error_code ec;
  if (std::filesystem::is_directory(out_dir, ec)) write_manifest(out_dir, m);
  out << Json({{"command", ctx.command}, {"exit_code", code}, {"out", out_dir}}).dump() << '\n';
  return code;
}

int run_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace rrg::cli
