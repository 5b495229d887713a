#include "nestasp/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "nestasp/nested.hpp"
#include "nestasp/parser.hpp"

namespace nestasp::cli {

namespace {

bool printed(const ClassicalLiteral& l, const RunConfig& config, const std::set<ClassicalLiteral>& host_facts) {
  if (config.format == Format::facts && host_facts.contains(l)) return false;
  if (config.filter_predicates && !config.filter_predicates->contains(l.predicate())) return false;
  return true;
}

nlohmann::json json_term(const Term& t) {
  if (t.is_integer()) return t.value();
  return to_string(t);
}

std::string render(const AnswerSet& a, const RunConfig& config, const std::set<ClassicalLiteral>& host_facts) {
  if (config.format == Format::json_lines) {
    nlohmann::json obj = nlohmann::json::object();
    for (const ClassicalLiteral& l : a.literals) {
      if (!printed(l, config, host_facts)) continue;
      nlohmann::json args = nlohmann::json::array();
      for (const Term& t : l.atom.args) args.push_back(json_term(t));
      obj[l.predicate()].push_back({{"args", std::move(args)}, {"sign", l.negated ? 1 : 0}});
    }
    return obj.dump();
  }
  AnswerSet shown;
  for (const ClassicalLiteral& l : a.literals)
    if (printed(l, config, host_facts)) shown.literals.push_back(l);
  return to_string(shown);
}

const char* kind_name(CallKind k) { return k == CallKind::embedded ? "embedded" : "file"; }

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const std::string origin = config.program_path.string();
  try {
    if (config.max_depth < 1) throw Error("--max-depth must be at least 1");
    std::ifstream in(config.program_path, std::ios::binary);
    if (!in) throw Error("cannot read program file");
    std::ostringstream text;
    text << in.rdbuf();

    Program program = parse_program(text.str());
    std::set<ClassicalLiteral> host_facts;
    for (const Rule& r : program.rules)
      if (r.is_fact()) host_facts.insert(r.head.front());

    Session session(config.max_depth);
    if (config.trace_calls) {
      session.cache().set_trace([&err](const AnswerCache::TraceEvent& e) {
        err << "call " << kind_name(e.key.kind) << " handle=" << e.handle << " depth=" << e.depth
            << " identity=" << escape_string(e.key.identity) << '\n';
      });
    }
    EvalContext context;
    context.base_dir = std::filesystem::absolute(config.program_path).parent_path();
    context.parallel = config.parallel;
    std::vector<AnswerSet> answers = session.evaluate(program, context);

    std::size_t limit = config.max_answer_sets == 0 ? answers.size() : std::min(answers.size(), config.max_answer_sets);
    for (std::size_t i = 0; i < limit; ++i) out << render(answers[i], config, host_facts) << '\n';
    out.flush();
    return answers.empty() ? 1 : 0;
  } catch (const ParseError& e) {
    err << origin << ':' << e.line() << ':' << e.column() << ": error: " << e.detail() << '\n';
  } catch (const std::exception& e) {
    err << origin << ": error: " << e.what() << '\n';
  }
  return 2;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluate a nested HEX-lite program and print its answer sets."};
  RunConfig config;
  std::optional<std::size_t> max_depth;
  std::vector<std::string> filter;
  std::string format = "default";
  app.add_option("--max-depth", max_depth, "Maximum subprogram nesting depth (default 16, or NESTASP_MAX_DEPTH)");
  app.add_option("--filter", filter, "Only print literals over these predicates")->delimiter(',');
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"default", "facts", "json-lines"}));
  app.add_flag("--trace-calls", config.trace_calls, "Report every subprogram evaluation on stderr");
  app.add_option("-n", config.max_answer_sets, "Print at most this many answer sets (0 = all)");
  app.add_flag("--parallel", config.parallel, "Solve independent branches on worker threads");
  app.add_option("FILE", config.program_path, "Host program")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "nestasp: " << e.what() << '\n';
    return 2;
  }

  if (max_depth) {
    config.max_depth = *max_depth;
  } else if (const char* env = std::getenv("NESTASP_MAX_DEPTH")) {
    try {
      config.max_depth = std::stoul(env);
    } catch (const std::exception&) {
      err << "nestasp: invalid NESTASP_MAX_DEPTH value '" << env << "'\n";
      return 2;
    }
  }
  if (!filter.empty()) config.filter_predicates = std::set<std::string>(filter.begin(), filter.end());
  config.format = format == "facts" ? Format::facts : format == "json-lines" ? Format::json_lines : Format::standard;
  return run(config, out, err);
}

}  // namespace nestasp::cli
