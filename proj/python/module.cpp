#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "opalg/fock.hpp"
#include "opalg/freegroup.hpp"
#include "opalg/freeprod.hpp"
#include "opalg/opspace.hpp"
#include "opalg/verify.hpp"

namespace py = pybind11;
using namespace opalg;

namespace {

OperatorFamily make_family(int n, int k, int d, const std::vector<ComplexMatrix>& entries) {
  return OperatorFamily::from_entries(n, k, d, entries);
}

AlphaMask mask_from(const OperatorFamily& fam, const std::vector<int>& positions) {
  return AlphaMask::from_positions(fam.degree(), positions);
}

TrialConfig config_from_kwargs(int n, int k, int d, int radius, int depth, int trials,
                               std::uint64_t seed, double tolerance, int mc_samples) {
  TrialConfig cfg;
  cfg.n = n;
  cfg.k = k;
  cfg.d = d;
  cfg.radius = radius;
  cfg.depth = depth;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.tolerance = tolerance;
  cfg.mc_samples = mc_samples;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "operator-space norm toolkit: matricization norms, truncated free-group and "
            "Fock-space representations, free products, and the inequality verification "
            "harness";

  py::register_exception<SizeLimitError>(m, "SizeLimitError");
  py::register_exception<ConvergenceError>(m, "ConvergenceError");

  py::class_<SparseOperator>(m, "SparseOperator")
      .def_property_readonly("shape",
                             [](const SparseOperator& s) {
                               return py::make_tuple(s.rows(), s.cols());
                             })
      .def_property_readonly("nnz", &SparseOperator::nonzero_count)
      .def("to_dense", &SparseOperator::to_dense)
      .def("apply", &SparseOperator::apply, py::arg("vector"))
      .def("adjoint", &SparseOperator::adjoint)
      .def("triplets",
           [](const SparseOperator& s) {
             std::vector<std::tuple<Eigen::Index, Eigen::Index, Complex>> out;
             for (const auto& t : s.triplets()) out.emplace_back(t.row, t.col, t.value);
             return out;
           })
      .def("__add__", &SparseOperator::operator+)
      .def("__sub__", &SparseOperator::operator-)
      .def("__matmul__", &SparseOperator::operator*);

  // dense kernels
  m.def("operator_norm",
        py::overload_cast<const ComplexMatrix&, double>(&operator_norm), py::arg("matrix"),
        py::arg("tol") = 1e-10);
  m.def("sparse_operator_norm",
        py::overload_cast<const SparseOperator&, double>(&operator_norm), py::arg("op"),
        py::arg("tol") = 1e-10);
  m.def("trace_norm", &trace_norm, py::arg("matrix"));
  m.def("hermitian_sqrt_norm", &hermitian_sqrt_norm, py::arg("matrix"));

  // free group
  py::class_<ReducedWord>(m, "ReducedWord")
      .def(py::init([](const std::vector<int>& letters) {
             return ReducedWord::from_letters(letters);
           }),
           py::arg("letters") = std::vector<int>{})
      .def_property_readonly("letters", &ReducedWord::letters)
      .def_property_readonly("length", &ReducedWord::length)
      .def("inverse", &ReducedWord::inverse)
      .def("__mul__", &multiply)
      .def("__eq__", [](const ReducedWord& a, const ReducedWord& b) { return a == b; })
      .def("__repr__", [](const ReducedWord& w) {
        std::string r = "ReducedWord([";
        for (std::size_t i = 0; i < w.letters().size(); ++i)
          r += (i ? ", " : "") + std::to_string(w.letters()[i]);
        return r + "])";
      });

  py::class_<GroupBall>(m, "GroupBall")
      .def(py::init<int, int>(), py::arg("generators"), py::arg("radius"))
      .def_property_readonly("size", &GroupBall::size)
      .def_property_readonly("generators", &GroupBall::generator_count)
      .def_property_readonly("radius", &GroupBall::radius)
      .def("word", &GroupBall::word, py::arg("index"))
      .def("index",
           [](const GroupBall& b, const ReducedWord& w) -> py::object {
             const auto idx = b.index(w);
             if (!idx) return py::none();
             return py::int_(*idx);
           },
           py::arg("word"));

  m.def("lambda_truncated", &lambda_truncated, py::arg("ball"), py::arg("word"));
  m.def("boundary_projections",
        [](const GroupBall& ball, int generator) {
          const BoundaryProjections p = boundary_projections(ball, generator);
          return py::make_tuple(p.e0, p.e_plus, p.e_minus);
        },
        py::arg("ball"), py::arg("generator"));
  m.def("haagerup_decomposition",
        [](const GroupBall& ball, int letter) {
          const HaagerupPair p = haagerup_decomposition(ball, letter);
          return py::make_tuple(p.u, p.v);
        },
        py::arg("ball"), py::arg("letter"));
  m.def("lambda_tensor_sum", &lambda_tensor_sum, py::arg("ball"), py::arg("words"),
        py::arg("coefficients"));

  // matricization norms
  py::class_<OperatorFamily>(m, "OperatorFamily")
      .def(py::init(&make_family), py::arg("n"), py::arg("k"), py::arg("d"), py::arg("entries"))
      .def_property_readonly("n", &OperatorFamily::index_range)
      .def_property_readonly("k", &OperatorFamily::degree)
      .def_property_readonly("d", &OperatorFamily::dim)
      .def_property_readonly("size", &OperatorFamily::family_size)
      .def("entry",
           [](const OperatorFamily& f, const std::vector<int>& J) { return f.entry(J); },
           py::arg("multi_index"));

  m.def("matricize",
        [](const OperatorFamily& f, const std::vector<int>& alpha) {
          return matricize(f, mask_from(f, alpha));
        },
        py::arg("family"), py::arg("alpha"));
  m.def("alpha_norm",
        [](const OperatorFamily& f, const std::vector<int>& alpha) {
          return alpha_norm(f, mask_from(f, alpha));
        },
        py::arg("family"), py::arg("alpha"));
  m.def("bracket_norm", &bracket_norm, py::arg("family"));
  m.def("dual_alpha_norm",
        [](const OperatorFamily& f, const std::vector<int>& alpha) {
          return dual_alpha_norm(f, mask_from(f, alpha));
        },
        py::arg("family"), py::arg("alpha"));
  m.def("dual_bracket_norm",
        [](const OperatorFamily& f, std::uint64_t seed) {
          DualBracketOptions opts;
          opts.seed = seed;
          const DualBracketCertificate cert = dual_bracket_norm(f, opts);
          return py::make_tuple(cert.lower, cert.upper);
        },
        py::arg("family"), py::arg("seed") = 2024);
  m.def("assemble_en_tensor",
        [](const OperatorFamily& f) {
          const EnAssembly a = assemble_en_tensor(f);
          return py::make_tuple(a.total, a.components);
        },
        py::arg("family"));

  // Fock space
  py::class_<FockBasis>(m, "FockBasis")
      .def(py::init<int, int>(), py::arg("alphabet"), py::arg("depth"))
      .def_property_readonly("size", &FockBasis::size)
      .def_property_readonly("alphabet", &FockBasis::alphabet)
      .def_property_readonly("depth", &FockBasis::depth)
      .def("word_at", &FockBasis::word_at, py::arg("index"))
      .def("index_of", &FockBasis::index_of, py::arg("word"));

  m.def("creation", &creation, py::arg("basis"), py::arg("letter"));
  m.def("vacuum_state", &vacuum_state, py::arg("basis"), py::arg("op"));
  m.def("semicircular_system",
        [](int n, int depth) {
          SemicircularSystem sys = semicircular_system(n, depth);
          return py::make_tuple(std::move(sys.basis), std::move(sys.x));
        },
        py::arg("n"), py::arg("depth"));
  m.def("circular_system",
        [](int n, int depth) {
          CircularSystem sys = circular_system(n, depth);
          return py::make_tuple(std::move(sys.basis), std::move(sys.y));
        },
        py::arg("n"), py::arg("depth"));
  m.def("cuntz_witness_value", &cuntz_witness_value, py::arg("n"), py::arg("depth"));
  m.def("flip_apply",
        [](const std::vector<ComplexMatrix>& column, const std::vector<ComplexMatrix>& row) {
          const ColumnRowFamily out = r_map_apply({column, row});
          return py::make_tuple(out.column_part, out.row_part);
        },
        py::arg("column_part"), py::arg("row_part"));
  m.def("column_row_norm",
        [](const std::vector<ComplexMatrix>& column, const std::vector<ComplexMatrix>& row) {
          return column_row_norm({column, row});
        },
        py::arg("column_part"), py::arg("row_part"));

  // free products
  py::class_<PointedSpace>(m, "PointedSpace")
      .def(py::init<int, int>(), py::arg("dim"), py::arg("unit_index"))
      .def_property_readonly("dim", &PointedSpace::dim)
      .def("state", &PointedSpace::state, py::arg("x"));

  py::class_<FreeProductSpace>(m, "FreeProductSpace")
      .def(py::init<std::vector<PointedSpace>, int, std::size_t>(), py::arg("factors"),
           py::arg("depth"), py::arg("max_dim") = 500000)
      .def_property_readonly("dimension", &FreeProductSpace::dimension)
      .def_property_readonly("depth", &FreeProductSpace::depth)
      .def("interior_projection", &FreeProductSpace::interior_projection);

  m.def("embed", &embed, py::arg("space"), py::arg("factor"), py::arg("x"));
  m.def("factor_projection", &factor_projection, py::arg("space"), py::arg("factor"));
  m.def("freeness_decomposition",
        [](const FreeProductSpace& space, int factor, const ComplexMatrix& x) {
          const FreenessPair p = freeness_decomposition(space, factor, x);
          return py::make_tuple(p.u, p.v);
        },
        py::arg("space"), py::arg("factor"), py::arg("x"));

  // verification harness
  m.def("suite_names", [] { return suite_names(); });
  m.def("run_suite_json",
        [](const std::string& name, int n, int k, int d, int radius, int depth, int trials,
           std::uint64_t seed, double tolerance, int mc_samples, bool include_runtime) {
          const TrialConfig cfg = config_from_kwargs(n, k, d, radius, depth, trials, seed,
                                                     tolerance, mc_samples);
          return run_suite(name, cfg).to_json(include_runtime).dump();
        },
        py::arg("name"), py::arg("n") = 2, py::arg("k") = 1, py::arg("d") = 2,
        py::arg("radius") = 4, py::arg("depth") = 8, py::arg("trials") = 10,
        py::arg("seed") = 1, py::arg("tolerance") = 1e-8, py::arg("mc_samples") = 10000,
        py::arg("include_runtime") = false);

  m.attr("__version__") = "0.1.0";
}
