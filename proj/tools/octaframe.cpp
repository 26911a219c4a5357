// octaframe command-line driver.
//
//   octaframe symmetrize --in "0,1,0,0,0,0,0" | random [--seed N] [--w1 X] [--w2 Y]
//                        [--max-iters N] [--tol T] [--out traj.csv]
//   octaframe field-opt  --spec field.json --out result.json [--levels N]
//   octaframe glyph      --octupole "a,b,c,d,e,f,g" [--subdiv N] --out glyph.obj
//   octaframe verify     [--samples N] [--seed S]
//
// Exit codes: 0 success, 1 usage or input error, 2 no convergence.

#include <octaframe/io.hpp>
#include <octaframe/octaframe.hpp>
#include <octaframe/verify.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace
{

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotConverged = 2;

std::string read_text(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw octaframe::ArgumentError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SymmetrizeArgs
{
  std::string in;
  std::uint64_t seed = 0;
  double w1 = 5.0, w2 = 2.5;
  int max_iters = 500;
  double tol = 1e-3;
  std::string out;
};

int run_symmetrize(const SymmetrizeArgs &args)
{
  using namespace octaframe;
  const PenaltyWeights w{args.w1, args.w2};
  w.validate();
  DescentConfig cfg;
  cfg.max_iters = args.max_iters;
  cfg.tol = args.tol;
  cfg.validate();

  Octupole a0;
  if (args.in == "random")
  {
    Rng rng(args.seed);
    a0 = random_unit_octupole(rng);
  }
  else
  {
    a0 = parse_octupole_list(args.in);
  }

  const Trajectory t = semisymmetrize(a0, w, cfg);
  std::ostringstream csv;
  write_trajectory_csv(csv, t);
  if (args.out.empty())
    std::cout << csv.str();
  else
    write_file_atomic(args.out, csv.str());

  if (t.perturbed)
    std::cerr << "note: start point was ~0, perturbed to 1e-3 * Y(3,-2)\n";
  std::cerr << "status: " << to_string(t.status) << " after " << t.points.back().iter << " iterations, sqrt(p) = "
            << format_double(t.points.back().sqrt_penalty) << '\n';
  return t.status == DescentStatus::Converged ? kOk : kNotConverged;
}

int run_field_opt(const std::string &spec_path, const std::string &out_path, int levels)
{
  using namespace octaframe;
  FieldSpec spec = parse_field_spec(read_text(spec_path));
  if (levels > 0)
    spec.config.levels = levels;
  const FieldOptResult r = optimize_field(spec.field, spec.config);
  write_file_atomic(out_path, dump_json(field_result_to_json(r)));

  const double final_energy = total_energy(r.field, spec.config.weights);
  std::cerr << "status: " << to_string(r.status) << ", levels " << r.energy_history.size() << ", energy "
            << format_double(final_energy) << '\n';
  return r.status == DescentStatus::Converged || r.status == DescentStatus::Stationary ? kOk : kNotConverged;
}

int run_glyph(const std::string &coeffs, int subdiv, const std::string &out_path)
{
  using namespace octaframe;
  const Octupole a = parse_octupole_list(coeffs);
  if (a.coeffs.cwiseAbs().maxCoeff() == 0.0)
  {
    std::cerr << "error: zero octupole\n";
    return kInputError;
  }
  std::ostringstream obj;
  write_obj(obj, glyph_mesh(a, subdiv));
  write_file_atomic(out_path, obj.str());
  return kOk;
}

int run_verify(int samples, std::uint64_t seed)
{
  using namespace octaframe;
  const VerifyReport rep = run_verification(samples, seed);
  std::cout << format_report(rep);
  return rep.all_pass() ? kOk : kInputError;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Octupole frame fields: semisymmetrization, field smoothing, glyphs, self-checks"};
  app.require_subcommand(1);

  SymmetrizeArgs sym;
  auto *cmd_sym = app.add_subcommand("symmetrize", "Gradient-descent semisymmetrization of one octupole");
  cmd_sym->add_option("--in", sym.in, "7 comma-separated coefficients (m=-3..3) or 'random'")->required();
  cmd_sym->add_option("--seed", sym.seed, "Seed for --in random");
  cmd_sym->add_option("--w1", sym.w1, "Scale term weight");
  cmd_sym->add_option("--w2", sym.w2, "Symmetry term weight");
  cmd_sym->add_option("--max-iters", sym.max_iters, "Iteration budget");
  cmd_sym->add_option("--tol", sym.tol, "Stop once sqrt(penalty) < tol");
  cmd_sym->add_option("--out", sym.out, "Trajectory CSV path (stdout if omitted)");

  std::string spec_path, field_out;
  int levels = 0;
  auto *cmd_field = app.add_subcommand("field-opt", "Optimize a frame field described by a JSON spec");
  cmd_field->add_option("--spec", spec_path, "Field spec JSON")->required();
  cmd_field->add_option("--out", field_out, "Result JSON path")->required();
  cmd_field->add_option("--levels", levels, "Coarse-to-fine levels (overrides the spec)")->check(CLI::PositiveNumber);

  std::string glyph_coeffs, glyph_out;
  int subdiv = 3;
  auto *cmd_glyph = app.add_subcommand("glyph", "Write the spherical plot of an octupole as Wavefront OBJ");
  cmd_glyph->add_option("--octupole", glyph_coeffs, "7 comma-separated coefficients")->required();
  cmd_glyph->add_option("--subdiv", subdiv, "Icosphere subdivision level (>= 1)");
  cmd_glyph->add_option("--out", glyph_out, "OBJ path")->required();

  int samples = 100;
  std::uint64_t verify_seed = 1;
  auto *cmd_verify = app.add_subcommand("verify", "Run the numerical oracle suite");
  cmd_verify->add_option("--samples", samples, "Random samples per check");
  cmd_verify->add_option("--seed", verify_seed, "Seed");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    app.exit(e);
    return kInputError;
  }

  try
  {
    if (*cmd_sym)
      return run_symmetrize(sym);
    if (*cmd_field)
      return run_field_opt(spec_path, field_out, levels);
    if (*cmd_glyph)
    {
      if (subdiv < 1)
        throw octaframe::ArgumentError("--subdiv must be at least 1");
      return run_glyph(glyph_coeffs, subdiv, glyph_out);
    }
    if (*cmd_verify)
      return run_verify(samples, verify_seed);
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
