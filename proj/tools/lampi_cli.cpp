#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "lampi/harness.hpp"
#include "lampi/lexer.hpp"
#include "lampi/trace.hpp"

using namespace lampi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;
constexpr int kExitParse = 65;

std::string read_input(const std::string& arg, const std::string& file) {
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  }
  return arg;
}

void write_trace(const std::string& path, const Trace& trace) {
  if (path.empty()) return;
  std::ofstream out(path);
  out << trace_to_json(trace) << "\n";
}

int run_verify(const std::string& property, const GenConfig& cfg, int fuel,
               bool json) {
  std::vector<CheckReport> reports;
  auto run_one = [&](const std::string& prop) {
    if (prop == "diamond-lambda") return check_diamond(cfg, "lambda");
    if (prop == "diamond-sharing") return check_diamond(cfg, "sharing");
    if (prop == "diamond-pi") return check_diamond(cfg, "pi");
    if (prop == "sr-lambda-typed")
      return check_subject_reduction(cfg, "lambda-typed");
    if (prop == "sr-lambda-wf") return check_subject_reduction(cfg, "lambda-wf");
    if (prop == "sr-sharing-typed")
      return check_subject_reduction(cfg, "sharing-typed");
    if (prop == "sr-sharing-wf")
      return check_subject_reduction(cfg, "sharing-wf");
    if (prop == "sr-pi") return check_subject_reduction(cfg, "pi");
    if (prop == "correspondence-1") return check_correspondence_1(cfg);
    if (prop == "correspondence-2") return check_correspondence_2(cfg, fuel);
    if (prop == "success-1") return check_success_sensitivity(cfg, 1);
    if (prop == "success-2") return check_success_sensitivity(cfg, 2);
    if (prop == "success-all") return check_success_sensitivity(cfg, 0);
    if (prop == "type-preservation-1") return check_type_preservation(cfg, 1);
    if (prop == "type-preservation-2") return check_type_preservation(cfg, 2);
    if (prop == "duality-canon") return check_duality_canon(cfg);
    throw CLI::ValidationError("unknown property " + prop);
  };
  if (property == "all") {
    for (const char* p :
         {"diamond-lambda", "diamond-sharing", "diamond-pi", "sr-lambda-typed",
          "sr-lambda-wf", "sr-sharing-typed", "sr-sharing-wf", "sr-pi",
          "correspondence-1", "correspondence-2", "success-1", "success-2",
          "type-preservation-1", "type-preservation-2", "duality-canon"})
      reports.push_back(run_one(p));
  } else {
    reports.push_back(run_one(property));
  }
  bool refuted = false;
  bool inconclusive = false;
  for (auto& r : reports) {
    if (json) {
      std::cout << report_to_json(r) << "\n";
    } else {
      std::cout << r.property << ": " << r.cases << " cases, "
                << r.failures.size() << " failures, " << r.inconclusive
                << " inconclusive\n";
      for (auto& f : r.failures)
        std::cout << "  counterexample (seed " << f.seed << "): " << f.subject
                  << "\n    " << f.detail << "\n";
    }
    if (!r.ok()) refuted = true;
    if (r.inconclusive > 0) inconclusive = true;
  }
  if (refuted) return kExitCheckFailed;
  if (inconclusive) return kExitInconclusive;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resource lambda calculi, session processes, and the "
               "translations between them"};
  app.require_subcommand(1);

  std::string expr_arg, file, calculus = "lambda", ctx_str, type_str;
  std::string to, env_str, trace_file, target_arg;
  bool wf = false, typed = false, via_sharing = false, check_flag = false;
  bool json = false;
  int fuel = 10000;
  GenConfig cfg;

  auto* parse_cmd = app.add_subcommand("parse", "parse and reprint");
  parse_cmd->add_option("expr", expr_arg);
  parse_cmd->add_option("--file", file);
  parse_cmd->add_option("--calculus", calculus)
      ->check(CLI::IsMember({"lambda", "sharing", "pi"}));

  auto* check_cmd = app.add_subcommand("check", "check a typing judgment");
  check_cmd->add_option("expr", expr_arg);
  check_cmd->add_option("--file", file);
  check_cmd->add_flag("--wf", wf, "well-formedness system");
  check_cmd->add_flag("--typed", typed, "typing system");
  check_cmd->add_option("--ctx", ctx_str, "context, e.g. 'x:unit, y:w'");
  check_cmd->add_option("--type", type_str, "target strict type");
  check_cmd->add_option("--calculus", calculus)
      ->check(CLI::IsMember({"lambda", "sharing"}));
  check_cmd->add_flag("--json", json);

  auto* eval_cmd = app.add_subcommand("eval", "normalize an expression");
  eval_cmd->add_option("expr", expr_arg);
  eval_cmd->add_option("--file", file);
  eval_cmd->add_option("--calculus", calculus)
      ->check(CLI::IsMember({"lambda", "sharing"}));
  eval_cmd->add_option("--fuel", fuel);
  eval_cmd->add_option("--trace", trace_file, "write the trace as JSON");

  auto* encode_cmd = app.add_subcommand("encode", "translate an expression");
  encode_cmd->add_option("expr", expr_arg);
  encode_cmd->add_option("--file", file);
  encode_cmd->add_option("--to", to)
      ->required()
      ->check(CLI::IsMember({"sharing", "pi"}));
  encode_cmd->add_flag("--via", via_sharing,
                       "read a source-calculus expression and go through "
                       "the sharing translation");
  encode_cmd->add_flag("--check", check_flag,
                       "verify preservation of the inferred judgment");

  auto* pi_cmd = app.add_subcommand("pi", "process operations");
  pi_cmd->require_subcommand(1);
  std::string pi_input;
  auto* pi_step = pi_cmd->add_subcommand("step", "list one-step reducts");
  pi_step->add_option("proc", pi_input);
  auto* pi_run = pi_cmd->add_subcommand("run", "normalize");
  pi_run->add_option("proc", pi_input);
  pi_run->add_option("--fuel", fuel);
  pi_run->add_option("--trace", trace_file);
  auto* pi_tc = pi_cmd->add_subcommand("typecheck", "session typecheck");
  pi_tc->add_option("proc", pi_input);
  pi_tc->add_option("--env", env_str, "context, e.g. 'x:&one, u:+bot'");
  auto* pi_reach = pi_cmd->add_subcommand("reach", "bounded reachability");
  pi_reach->add_option("proc", pi_input);
  pi_reach->add_option("target", target_arg);
  pi_reach->add_option("--fuel", fuel);

  auto* verify_cmd =
      app.add_subcommand("verify", "run a property suite (exit 0 pass, "
                                    "1 refuted, 2 inconclusive)");
  std::string property = "all";
  verify_cmd->add_option("property", property);
  verify_cmd->add_option("--seed", cfg.seed);
  verify_cmd->add_option("--cases", cfg.cases);
  verify_cmd->add_option("--depth", cfg.max_depth);
  verify_cmd->add_option("--max-bag", cfg.max_bag);
  verify_cmd->add_option("--fuel", fuel);
  verify_cmd->add_flag("--json", json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*parse_cmd) {
      std::string text = read_input(expr_arg, file);
      if (calculus == "lambda")
        std::cout << print_expr(parse_expr(text)) << "\n";
      else if (calculus == "sharing")
        std::cout << print_shar_expr(parse_shar_expr(text)) << "\n";
      else
        std::cout << print_process(parse_process(text)) << "\n";
      return kExitOk;
    }

    if (*check_cmd) {
      if (wf == typed) {
        std::cerr << "exactly one of --typed / --wf is required\n";
        return kExitUsage;
      }
      std::string text = read_input(expr_arg, file);
      TypeContext ctx = parse_context(ctx_str);
      StrictPtr type = parse_strict_type(type_str);
      CheckResult r;
      if (calculus == "lambda") {
        Expr e = parse_expr(text);
        r = wf ? check_wellformed_lambda(ctx, e, type)
               : check_typed_lambda(ctx, e, type);
      } else {
        SharExpr e = parse_shar_expr(text);
        if (auto v = validate(e)) {
          std::cerr << "invalid term: " << v->message << "\n";
          return kExitCheckFailed;
        }
        r = wf ? check_wellformed_sharing(ctx, e, type)
               : check_typed_sharing(ctx, e, type);
      }
      if (!r.ok) {
        std::cerr << "rejected: " << r.reason << "\n";
        return kExitCheckFailed;
      }
      std::cout << "accepted\n" << print_derivation(r.deriv);
      return kExitOk;
    }

    if (*eval_cmd) {
      std::string text = read_input(expr_arg, file);
      ReduceConfig rc;
      rc.fuel = fuel;
      if (calculus == "lambda") {
        NormalizeResult r = normalize(parse_expr(text), rc);
        write_trace(trace_file, r.trace);
        if (!r.ok) {
          std::cerr << r.error << "\n";
          return kExitCheckFailed;
        }
        std::cout << print_expr(canon_expr(r.result)) << "\n";
      } else {
        SharNormalizeResult r = shar_normalize(parse_shar_expr(text), rc);
        write_trace(trace_file, r.trace);
        if (!r.ok) {
          std::cerr << r.error << "\n";
          return kExitCheckFailed;
        }
        std::cout << print_shar_expr(canon_shar_expr(r.result)) << "\n";
      }
      return kExitOk;
    }

    if (*encode_cmd) {
      std::string text = read_input(expr_arg, file);
      if (to == "sharing") {
        Expr e = parse_expr(text);
        SharExpr s = encode_open(e);
        std::cout << print_shar_expr(s) << "\n";
        if (check_flag) {
          InferResult inf = infer_wellformed_lambda(e);
          if (!inf.ok) {
            std::cerr << "source not well-formed: " << inf.reason << "\n";
            return kExitCheckFailed;
          }
          TypeContext collapsed = translate_context(inf.ctx);
          CheckResult r = check_wellformed_sharing(collapsed, s, inf.type);
          if (!r.ok) {
            std::cerr << "translated judgment rejected: " << r.reason << "\n";
            return kExitCheckFailed;
          }
          std::cerr << "well-formedness preserved at " << print_context(collapsed)
                    << " |= _ : " << print_strict(inf.type) << "\n";
        }
        return kExitOk;
      }
      SharExpr s;
      TypeContext sharing_ctx;
      StrictPtr type;
      if (via_sharing) {
        Expr e = parse_expr(text);
        InferResult inf = infer_wellformed_lambda(e);
        if (!inf.ok) {
          std::cerr << "source not well-formed: " << inf.reason << "\n";
          return kExitCheckFailed;
        }
        s = encode_open(e);
        sharing_ctx = translate_context(inf.ctx);
        type = inf.type;
      } else {
        s = parse_shar_expr(text);
        InferResult inf = infer_wellformed_sharing(s);
        if (!inf.ok) {
          std::cerr << "source not well-formed: " << inf.reason << "\n";
          return kExitCheckFailed;
        }
        sharing_ctx = inf.ctx;
        type = inf.type;
      }
      SharingTypeInfo info;
      CheckResult wfr =
          check_wellformed_sharing_info(sharing_ctx, s, type, &info);
      ProcPtr p = encode_process(s, Name{"u"}, wfr.ok ? &info : nullptr);
      std::cout << print_process(p) << "\n";
      TypingEnv env = encode_typing_env(sharing_ctx);
      env[Name{"u"}] = encode_strict_type(type);
      std::cerr << "typed context: " << print_typing_env(env) << "\n";
      if (check_flag) {
        auto r = pi_typecheck(p, env);
        if (!r.ok) {
          std::cerr << "session typing rejected: " << r.reason << "\n";
          return kExitCheckFailed;
        }
        std::cerr << "session typing preserved\n";
      }
      return kExitOk;
    }

    if (*pi_cmd) {
      if (*pi_step) {
        ProcPtr p = parse_process(pi_input);
        for (auto& st : pi_step_all(p))
          std::cout << to_string(st.tag) << ": " << print_process(st.result)
                    << "\n";
        return kExitOk;
      }
      if (*pi_run) {
        PiNormalizeResult r = pi_normalize(parse_process(pi_input), fuel);
        write_trace(trace_file, r.trace);
        if (!r.ok) {
          std::cerr << r.error << "\n";
          return kExitCheckFailed;
        }
        std::cout << print_process(r.result) << "\n";
        return kExitOk;
      }
      if (*pi_tc) {
        auto r =
            pi_typecheck(parse_process(pi_input), parse_typing_env(env_str));
        if (!r.ok) {
          std::cerr << "rejected: " << r.reason << "\n";
          return kExitCheckFailed;
        }
        std::cout << "accepted: " << print_typing_env(r.inferred) << "\n";
        return kExitOk;
      }
      if (*pi_reach) {
        auto r = pi_reaches(parse_process(pi_input), parse_process(target_arg),
                            fuel);
        if (r.reached) {
          std::cout << "reached in " << r.steps << " steps (" << r.visited
                    << " states)\n";
          return kExitOk;
        }
        std::cerr << "not reached (" << r.visited << " states): " << r.error
                  << "\n";
        return kExitCheckFailed;
      }
    }

    if (*verify_cmd) return run_verify(property, cfg, fuel, json);
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
