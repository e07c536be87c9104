#include "curlfem/assembly.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <thread>
#include <vector>

namespace curlfem {

namespace {

using LocalMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;
using LocalVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1, 0, 6, 1>;

enum class Operand { Value, Derivative };

// Component of a shape sample taking part in a product: either a scalar or a vector.
struct Factor {
    Real scalar = 0.0;
    Vec3 vector = Vec3::Zero();
    bool is_vector = false;
};

Factor factor(Family family, const ShapeSample& s, Operand op) {
    if (op == Operand::Value) {
        return is_vector_family(family) ? Factor{0.0, s.vector, true} : Factor{s.scalar, Vec3::Zero(), false};
    }
    switch (family) {
    case Family::H1:
    case Family::HCurl: return {0.0, s.derivative, true};
    case Family::HDiv: return {s.divergence, Vec3::Zero(), false};
    case Family::L2: break;
    }
    throw InvalidArgument("the L2 family has no derivative");
}

Real product(const Factor& a, const Factor& b) {
    if (a.is_vector != b.is_vector) {
        throw InvalidArgument("bilinear term pairs a scalar with a vector");
    }
    return a.is_vector ? a.vector.dot(b.vector) : a.scalar * b.scalar;
}

// One term w(x) <trial_j, test_i> of a bilinear form.
struct Term {
    const CoefficientField* weight;
    Operand test;
    Operand trial;
};

class FormAssembler {
public:
    FormAssembler(std::shared_ptr<const FeSpace> rows, std::shared_ptr<const FeSpace> cols,
                  std::vector<Term> terms, const AssemblyOptions& options)
        : rows_(std::move(rows)), cols_(std::move(cols)), terms_(std::move(terms)),
          rule_(tet_rule(options.quad_degree)), threads_(std::max(1, options.threads)) {
        if (&rows_->mesh() != &cols_->mesh()) {
            throw InvalidArgument("row and column spaces live on different meshes");
        }
        for (const Term& t : terms_) {
            t.weight->validate(rows_->mesh());
        }
        for (const Vec3& p : rule_.points) {
            row_ref_.push_back(eval_basis(rows_->family(), p));
            col_ref_.push_back(eval_basis(cols_->family(), p));
        }
    }

    SparseMatrixC run() const {
        const Mesh& mesh = rows_->mesh();
        const int n_cells = mesh.num_cells();
        std::vector<Eigen::Triplet<Complex>> triplets;
        triplets.reserve(static_cast<std::size_t>(n_cells) * static_cast<std::size_t>(rows_->local_count()) *
                         static_cast<std::size_t>(cols_->local_count()));

        constexpr int kBlock = 4096;
        std::vector<LocalMatrix> block(static_cast<std::size_t>(std::min(kBlock, n_cells)));
        for (int begin = 0; begin < n_cells; begin += kBlock) {
            const int end = std::min(n_cells, begin + kBlock);
            compute_block(begin, end, block);
            for (int cell = begin; cell < end; ++cell) {
                scatter(cell, block[static_cast<std::size_t>(cell - begin)], triplets);
            }
        }
        SparseMatrixC m(rows_->num_dofs(), cols_->num_dofs());
        m.setFromTriplets(triplets.begin(), triplets.end());
        m.makeCompressed();
        return m;
    }

private:
    void compute_block(int begin, int end, std::vector<LocalMatrix>& out) const {
        const int count = end - begin;
        const int workers = std::min(threads_, count);
        if (workers <= 1) {
            for (int cell = begin; cell < end; ++cell) {
                out[static_cast<std::size_t>(cell - begin)] = local(cell);
            }
            return;
        }
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int cell = begin + w; cell < end; cell += workers) {
                    out[static_cast<std::size_t>(cell - begin)] = local(cell);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    LocalMatrix local(int cell) const {
        const Mesh& mesh = rows_->mesh();
        const CellTransform& t = mesh.transform(cell);
        const int tag = mesh.cell_tag(cell);
        const int nr = rows_->local_count();
        const int nc = cols_->local_count();
        LocalMatrix out = LocalMatrix::Zero(nr, nc);
        for (std::size_t q = 0; q < rule_.size(); ++q) {
            const ShapeSet row = pushforward(rows_->family(), t, row_ref_[q]);
            const ShapeSet col = pushforward(cols_->family(), t, col_ref_[q]);
            const Vec3 x = t.map(rule_.points[q]);
            const Real dx = rule_.weights[q] * t.det;
            for (const Term& term : terms_) {
                const Complex w = (*term.weight)(tag, x) * dx;
                if (w == Complex{0.0}) {
                    continue;
                }
                for (int i = 0; i < nr; ++i) {
                    const Factor fi = factor(rows_->family(), row[i], term.test);
                    for (int j = 0; j < nc; ++j) {
                        out(i, j) += w * product(fi, factor(cols_->family(), col[j], term.trial));
                    }
                }
            }
        }
        return out;
    }

    void scatter(int cell, const LocalMatrix& local, std::vector<Eigen::Triplet<Complex>>& triplets) const {
        const auto rd = rows_->cell_dofs(cell);
        const auto rs = rows_->cell_signs(cell);
        const auto cd = cols_->cell_dofs(cell);
        const auto cs = cols_->cell_signs(cell);
        for (std::size_t i = 0; i < rd.size(); ++i) {
            if (rd[i] < 0) {
                continue;
            }
            for (std::size_t j = 0; j < cd.size(); ++j) {
                if (cd[j] < 0) {
                    continue;
                }
                const Complex v = static_cast<Real>(rs[i] * cs[j]) * local(static_cast<Eigen::Index>(i),
                                                                           static_cast<Eigen::Index>(j));
                if (v != Complex{0.0}) {
                    triplets.emplace_back(rd[i], cd[j], v);
                }
            }
        }
    }

    std::shared_ptr<const FeSpace> rows_;
    std::shared_ptr<const FeSpace> cols_;
    std::vector<Term> terms_;
    TetQuadrature rule_;
    int threads_;
    std::vector<ShapeSet> row_ref_;
    std::vector<ShapeSet> col_ref_;
};

void require_family(const FeSpace& space, Family family, const char* what) {
    if (space.family() != family) {
        throw InvalidArgument(std::string(what) + " requires a " + std::string(family_name(family)) +
                              " space, got " + std::string(family_name(space.family())));
    }
}

SystemMatrix make_system(std::shared_ptr<const FeSpace> rows, std::shared_ptr<const FeSpace> cols,
                         std::vector<Term> terms, const AssemblyOptions& options, bool symmetric) {
    SystemMatrix out;
    out.matrix = FormAssembler(rows, cols, std::move(terms), options).run();
    out.row_space = std::move(rows);
    out.col_space = std::move(cols);
    out.symmetric = symmetric;
    return out;
}

}  // namespace

Real SystemMatrix::symmetry_defect() const {
    if (matrix.rows() != matrix.cols()) {
        throw InvalidArgument("symmetry is defined for square matrices only");
    }
    const SparseMatrixC diff = matrix - SparseMatrixC(matrix.transpose());
    Real scale = 0.0;
    for (int k = 0; k < matrix.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(matrix, k); it; ++it) {
            scale = std::max(scale, std::abs(it.value()));
        }
    }
    Real defect = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(diff, k); it; ++it) {
            defect = std::max(defect, std::abs(it.value()));
        }
    }
    return scale == 0.0 ? 0.0 : defect / scale;
}

ElementMatrices element_matrices(const CellTransform& transform, const PointCoefficient& mu,
                                 const PointCoefficient& kappa, const TetQuadrature& rule) {
    ElementMatrices out;
    out.mass.setZero();
    out.curl_curl.setZero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const ShapeSet phi = eval_physical_basis(Family::HCurl, transform, rule.points[q]);
        const Vec3 x = transform.map(rule.points[q]);
        const Real dx = rule.weights[q] * transform.det;
        const Complex m = mu(x) * dx;
        const Complex k = kappa(x) * dx;
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                out.mass(i, j) += m * phi[j].vector.dot(phi[i].vector);
                out.curl_curl(i, j) += k * phi[j].derivative.dot(phi[i].derivative);
            }
        }
    }
    return out;
}

SystemMatrix assemble_a(std::shared_ptr<const FeSpace> space, const CoefficientField& mu,
                        const CoefficientField& kappa, const AssemblyOptions& options) {
    require_family(*space, Family::HCurl, "assemble_a");
    return make_system(space, space,
                       {{&mu, Operand::Value, Operand::Value}, {&kappa, Operand::Derivative, Operand::Derivative}},
                       options, true);
}

SystemMatrix assemble_mass(std::shared_ptr<const FeSpace> space, const CoefficientField& weight,
                           const AssemblyOptions& options) {
    return make_system(space, space, {{&weight, Operand::Value, Operand::Value}}, options, true);
}

SystemMatrix assemble_curl_curl(std::shared_ptr<const FeSpace> space, const CoefficientField& weight,
                                const AssemblyOptions& options) {
    require_family(*space, Family::HCurl, "assemble_curl_curl");
    return make_system(space, space, {{&weight, Operand::Derivative, Operand::Derivative}}, options, true);
}

SystemMatrix assemble_stiffness(std::shared_ptr<const FeSpace> space, const CoefficientField& weight,
                                const AssemblyOptions& options) {
    require_family(*space, Family::H1, "assemble_stiffness");
    return make_system(space, space, {{&weight, Operand::Derivative, Operand::Derivative}}, options, true);
}

SystemMatrix assemble_grad_coupling(std::shared_ptr<const FeSpace> h1, std::shared_ptr<const FeSpace> hcurl,
                                    const CoefficientField& mu, const AssemblyOptions& options) {
    require_family(*h1, Family::H1, "assemble_grad_coupling");
    require_family(*hcurl, Family::HCurl, "assemble_grad_coupling");
    if (&h1->mesh() != &hcurl->mesh()) {
        throw InvalidArgument("assemble_grad_coupling: spaces live on different meshes");
    }
    if (h1->bc() != hcurl->bc()) {
        throw InvalidArgument("assemble_grad_coupling: spaces carry different boundary conditions");
    }
    return make_system(h1, hcurl, {{&mu, Operand::Derivative, Operand::Value}}, options, false);
}

SystemMatrix hcurl_norm_matrix(std::shared_ptr<const FeSpace> space, Real ell_d, const AssemblyOptions& options) {
    const CoefficientField one = CoefficientField::constant(1.0);
    const CoefficientField scale = CoefficientField::constant(ell_d * ell_d);
    return assemble_a(std::move(space), one, scale, options);
}

Eigen::VectorXcd assemble_l(const FeSpace& space, const VectorField& f, const AssemblyOptions& options) {
    if (!is_vector_family(space.family())) {
        throw InvalidArgument("assemble_l requires a vector family");
    }
    const Mesh& mesh = space.mesh();
    const TetQuadrature rule = tet_rule(options.quad_degree);
    std::vector<ShapeSet> ref;
    for (const Vec3& p : rule.points) {
        ref.push_back(eval_basis(space.family(), p));
    }
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(space.num_dofs());
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellTransform& t = mesh.transform(cell);
        LocalVector local = LocalVector::Zero(space.local_count());
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const ShapeSet phi = pushforward(space.family(), t, ref[q]);
            const CVec3 fx = f.value(t.map(rule.points[q])) * (rule.weights[q] * t.det);
            for (int i = 0; i < phi.count; ++i) {
                const Vec3& v = phi[i].vector;
                local(i) += fx.x() * v.x() + fx.y() * v.y() + fx.z() * v.z();
            }
        }
        const auto dofs = space.cell_dofs(cell);
        const auto signs = space.cell_signs(cell);
        for (std::size_t i = 0; i < dofs.size(); ++i) {
            if (dofs[i] >= 0) {
                out[dofs[i]] += static_cast<Real>(signs[i]) * local(static_cast<Eigen::Index>(i));
            }
        }
    }
    return out;
}

Complex sesquilinear(const SparseMatrixC& a, const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
    return x.dot(a * y);
}

void write_matrix_coo(std::ostream& out, const SparseMatrixC& matrix) {
    out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
    out << std::setprecision(17);
    for (int k = 0; k < matrix.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(matrix, k); it; ++it) {
            out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
        }
    }
}

}  // namespace curlfem
