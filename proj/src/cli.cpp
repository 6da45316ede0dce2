#include "knotrace/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "knotrace/diagram.hpp"
#include "knotrace/error.hpp"
#include "knotrace/extract.hpp"
#include "knotrace/render.hpp"
#include "knotrace/spec_io.hpp"

namespace knotrace {

namespace {

// Smallest grid the genericity scan accepts (its default is max(256, 8N)).
constexpr int kMinGrid = 256;
constexpr int kMinTimeGrid = 16;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::MalformedCode:
    case ErrorCode::InvalidArgument: return kExitBadInput;
    case ErrorCode::ResolutionConflict: return kExitConflict;
    default: return kExitFailed;
  }
}

// Thrown for validation failures that are not library errors.
struct Failure {
  int code;
  std::string message;
};

struct Options {
  RunConfig config;
  std::string format = "text";
  std::string input;
  std::string out;
};

void add_common(CLI::App* cmd, Options& o) {
  auto& g = o.config.genericity;
  auto& t = o.config.trace;
  cmd->add_option("--grid", g.grid, "Parameter grid per axis for crossing search (0: max(256, 8N))")
      ->capture_default_str();
  cmd->add_option("--t-grid", t.t_grid, "Time samples for tracing")->capture_default_str();
  cmd->add_option("--max-refine", t.max_refine, "Halvings of an unresolved time cell")->capture_default_str();
  cmd->add_option("--tol-newton", g.newton_tol, "Newton residual on |p f(u1) - p f(u2)|")->capture_default_str();
  cmd->add_option("--tol-immersion", g.immersion_rel, "Minimum projected speed, x scale")->capture_default_str();
  cmd->add_option("--tol-triple", g.triple_rel, "Minimum crossing separation, x scale")->capture_default_str();
  cmd->add_option("--tol-embedded", g.embedded_rel, "Minimum 3D separation over chord, x scale")
      ->capture_default_str();
  cmd->add_option("--tol-transversality", g.transversality, "Minimum |sin| of crossing angles")
      ->capture_default_str();
  cmd->add_option("--tol-z", o.config.z_rel, "Minimum z-gap at a crossing, x scale")->capture_default_str();
  cmd->add_option("--tol-bisect", t.bisect_tol, "Event time bracket width")->capture_default_str();
  cmd->add_option("--tol-degenerate", t.degenerate_rel, "Smallest derivative data a classifier accepts, x scale")
      ->capture_default_str();
  cmd->add_option("--tol-isolation", t.isolation_factor, "Events closer than this x tol-bisect are simultaneous")
      ->capture_default_str();
  cmd->add_option("--max-degree", o.config.max_degree, "Largest Fourier degree accepted in input")
      ->capture_default_str();
  cmd->add_option("--seed", o.config.seed, "Seed for --perturb")->capture_default_str();
  cmd->add_flag("--perturb", o.config.perturb, "Perturb a non-generic loop into general position");
  cmd->add_option("--perturb-size", o.config.perturb_magnitude, "First perturbation magnitude (doubles per attempt)")
      ->capture_default_str();
  cmd->add_option("--n", o.config.moduli, "Coloring moduli, comma separated")->delimiter(',')->capture_default_str();
  cmd->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"text", "kv", "key-value", "svg"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Write the report here instead of stdout");
}

OutputFormat parse_format(const std::string& s) {
  if (s == "kv" || s == "key-value") return OutputFormat::KeyValue;
  if (s == "svg") return OutputFormat::Svg;
  return OutputFormat::Text;
}

FourierLoop load_loop(const std::string& path, const RunConfig& c) {
  return parse_knot_spec(read_text_file(path), ParseOptions{c.max_degree});
}

// The loop itself when generic, otherwise its perturbation if allowed.
FourierLoop generic_loop(const FourierLoop& loop, const RunConfig& c) {
  if (c.perturb) return perturb_to_generic(loop, c.seed, c.perturb_magnitude, c.genericity);
  const GenericityReport r = validate(loop, c.genericity);
  if (!r.passed()) {
    std::string why;
    if (!r.embedded()) why += " not embedded;";
    if (!r.immersed()) why += " projection not immersed;";
    if (!r.no_triple()) why += " triple point;";
    if (!r.transverse()) why += " tangential crossing;";
    for (const auto& d : r.diagnostics) why += fmt::format(" {};", to_string(d.code));
    why.pop_back();
    throw Failure{kExitFailed, fmt::format("projection is not a knot diagram:{}; rerun with --perturb", why)};
  }
  return loop;
}

Diagram diagram_of(const FourierLoop& loop, const RunConfig& c) {
  const auto points = validate(loop, c.genericity).double_points;
  return extract_diagram(loop, points, c.z_rel * loop.scale()).diagram;
}

// A path that exists is a knot spec file; anything else is a Gauss code.
bool is_file(const std::string& input) {
  std::error_code ec;
  return std::filesystem::is_regular_file(input, ec);
}

std::string cmd_validate(const Options& o, int& status) {
  const RunConfig& c = o.config;
  FourierLoop loop = load_loop(o.input, c);
  if (c.perturb) loop = perturb_to_generic(loop, c.seed, c.perturb_magnitude, c.genericity);
  const GenericityReport r = validate(loop, c.genericity);
  status = r.passed() ? kExitOk : kExitFailed;
  switch (c.format) {
    case OutputFormat::KeyValue: return format_report_kv(r);
    case OutputFormat::Svg:
      if (!r.passed()) throw Failure{kExitFailed, "cannot draw a loop that fails validation"};
      return render_svg(loop);
    case OutputFormat::Text: break;
  }
  return format_report_text(r);
}

std::string cmd_extract(const Options& o) {
  const RunConfig& c = o.config;
  const FourierLoop loop = generic_loop(load_loop(o.input, c), c);
  const Diagram d = canonical_form(diagram_of(loop, c));
  switch (c.format) {
    case OutputFormat::KeyValue:
      return fmt::format("crossings={}\ngauss={}\npd={}\nwrithe={}\n", d.crossing_count(), format_gauss(d),
                         format_pd(d), writhe(d));
    case OutputFormat::Svg: return render_svg(loop);
    case OutputFormat::Text: break;
  }
  return format_gauss(d) + "\n";
}

Diagram diagram_from_input(const Options& o) {
  if (is_file(o.input)) {
    const FourierLoop loop = generic_loop(load_loop(o.input, o.config), o.config);
    return diagram_of(loop, o.config);
  }
  return parse_gauss(o.input);
}

std::string cmd_invariants(const Options& o) {
  const Diagram d = diagram_from_input(o);
  std::vector<std::string> fields;
  for (int n : o.config.moduli) fields.push_back(fmt::format("colorings_{}={}", n, fox_colorings(d, n)));
  fields.push_back(fmt::format("writhe={}", writhe(d)));
  fields.push_back(fmt::format("crossings={}", d.crossing_count()));
  if (o.config.format == OutputFormat::Svg) throw Failure{kExitBadInput, "invariants has no SVG form"};
  return fmt::format("{}\n", fmt::join(fields, o.config.format == OutputFormat::KeyValue ? "\n" : " "));
}

std::string cmd_trace(const Options& o, int& status) {
  if (o.config.format == OutputFormat::Svg) throw Failure{kExitBadInput, "trace has no SVG form"};
  const IsotopyFamily family = parse_isotopy_spec(read_text_file(o.input), ParseOptions{o.config.max_degree});
  TraceConfig tc = o.config.trace;
  tc.genericity = o.config.genericity;
  tc.colorings = o.config.moduli;
  const MoveScript script = trace(family, tc);
  status = script.ok() ? kExitOk : kExitFailed;
  return format_move_script(script);
}

std::string cmd_render(const Options& o) {
  if (is_file(o.input)) return render_svg(generic_loop(load_loop(o.input, o.config), o.config));
  return render_svg(parse_gauss(o.input));
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (f) f << text;
  if (!f) throw Failure{kExitBadInput, fmt::format("cannot write '{}'", path)};
}

}  // namespace

void check_config(const RunConfig& c) {
  const auto& g = c.genericity;
  const auto& t = c.trace;
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, fmt::format("{} must be > 0", name));
  };
  positive(g.newton_tol, "--tol-newton");
  positive(g.immersion_rel, "--tol-immersion");
  positive(g.triple_rel, "--tol-triple");
  positive(g.embedded_rel, "--tol-embedded");
  positive(g.transversality, "--tol-transversality");
  positive(c.z_rel, "--tol-z");
  positive(t.bisect_tol, "--tol-bisect");
  positive(t.degenerate_rel, "--tol-degenerate");
  positive(t.isolation_factor, "--tol-isolation");
  positive(c.perturb_magnitude, "--perturb-size");
  if (g.grid != 0 && g.grid < kMinGrid)
    throw Error(ErrorCode::InvalidArgument, fmt::format("--grid must be 0 (automatic) or >= {}", kMinGrid));
  if (t.t_grid < kMinTimeGrid)
    throw Error(ErrorCode::InvalidArgument, fmt::format("--t-grid must be >= {}", kMinTimeGrid));
  if (t.max_refine < 0) throw Error(ErrorCode::InvalidArgument, "--max-refine must be >= 0");
  if (c.max_degree < 1) throw Error(ErrorCode::InvalidArgument, "--max-degree must be >= 1");
  for (int n : c.moduli)
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "--n values must be >= 2");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Knot diagrams from Fourier loops, and Reidemeister moves from isotopies", "knotrace"};
  app.require_subcommand(1);
  Options o;
  std::string svg_path;

  auto* validate_cmd = app.add_subcommand("validate", "Check that a loop projects to a knot diagram");
  validate_cmd->add_option("file", o.input, "Knot spec")->required();
  auto* extract_cmd = app.add_subcommand("extract", "Print the canonical Gauss code of a loop's diagram");
  extract_cmd->add_option("file", o.input, "Knot spec")->required();
  auto* invariants_cmd = app.add_subcommand("invariants", "Fox colorings and writhe");
  invariants_cmd->add_option("input", o.input, "Knot spec file or Gauss code such as 'O1+ U2+ O3+ U1+ O2+ U3+'")
      ->required();
  auto* trace_cmd = app.add_subcommand("trace", "Reidemeister moves along an isotopy");
  trace_cmd->add_option("file", o.input, "Isotopy spec")->required();
  auto* render_cmd = app.add_subcommand("render", "Draw a loop or a Gauss code as SVG");
  render_cmd->add_option("input", o.input, "Knot spec file or Gauss code")->required();
  render_cmd->add_option("svg", svg_path, "Output file (stdout if omitted)");
  for (auto* cmd : {validate_cmd, extract_cmd, invariants_cmd, trace_cmd, render_cmd}) add_common(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    o.config.format = parse_format(o.format);
    check_config(o.config);
    int status = kExitOk;
    std::string text;
    if (*validate_cmd) {
      text = cmd_validate(o, status);
    } else if (*extract_cmd) {
      text = cmd_extract(o);
    } else if (*invariants_cmd) {
      text = cmd_invariants(o);
    } else if (*trace_cmd) {
      text = cmd_trace(o, status);
    } else {
      text = cmd_render(o);
      if (o.out.empty()) o.out = svg_path;
    }
    emit(text, o.out, out);
    return status;
  } catch (const Failure& f) {
    err << "knotrace: " << f.message << "\n";
    return f.code;
  } catch (const Error& e) {
    err << "knotrace: " << e.what() << "\n";
    return exit_code(e.code());
  }
}

}  // namespace knotrace
