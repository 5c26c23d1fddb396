#include "quakestat/scaling.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include "quakestat/csv.hpp"
#include "quakestat/errors.hpp"
#include "quakestat/format.hpp"

namespace quakestat::scaling {
namespace {

TableRow lin(int row, const char* zone, const char* mech, double a0, double a1, double s, double e, std::size_t n) {
    return {row, false, {a0, a1, 0.0, s, e, n, zone, mech}};
}

TableRow quad(int row, const char* zone, const char* mech, double a0, double a1, double a2, double s, double e,
              std::size_t n) {
    return {row, true, {a0, a1, a2, s, e, n, zone, mech}};
}

const std::array<TableRow, 22> kTable1 = {
    lin(1, "All", "All", 2.48, 0.492, 0.134, 0.468, 160),
    quad(2, "All", "All", 2.48, 0.493, 0.0013, 0.134, 0.468, 160),
    lin(3, "All", "Thrust", 2.48, 0.501, 0.132, 0.457, 115),
    quad(4, "All", "Thrust", 2.48, 0.499, 0.0022, 0.132, 0.458, 115),
    lin(5, "All", "Normal", 2.47, 0.532, 0.076, 0.132, 15),
    quad(6, "All", "Normal", 2.46, 0.427, -0.0884, 0.075, 0.137, 15),
    lin(7, "All", "Strike-slip", 2.47, 0.437, 0.153, 0.276, 30),
    quad(8, "All", "Strike-slip", 2.49, 0.490, 0.0038, 0.153, 0.278, 30),
    lin(9, "Trench", "All", 2.47, 0.499, 0.131, 0.454, 129),
    quad(10, "Trench", "All", 2.47, 0.482, -0.0177, 0.131, 0.449, 129),
    lin(11, "Trench", "Thrust", 2.48, 0.500, 0.135, 0.460, 104),
    quad(12, "Trench", "Thrust", 2.48, 0.488, -0.0142, 0.135, 0.455, 104),
    lin(13, "Trench", "Normal", 2.47, 0.543, 0.067, 0.120, 12),
    quad(14, "Trench", "Normal", 2.46, 0.440, -0.0915, 0.065, 0.114, 12),
    lin(15, "Trench", "Strike-slip", 2.38, 0.409, 0.146, 0.302, 13),
    quad(16, "Trench", "Strike-slip", 2.29, 0.034, -0.2790, 0.142, 0.268, 13),
    lin(17, "Active continent", "All", 2.52, 0.504, 0.138, 0.256, 27),
    quad(18, "Active continent", "All", 2.74, 1.180, 0.4250, 0.135, 0.220, 27),
    lin(19, "Active continent", "Thrust", 2.44, 0.480, 0.112, 0.176, 10),
    quad(20, "Active continent", "Thrust", 3.00, 2.210, 1.0800, 0.064, 0.130, 10),
    lin(21, "Active continent", "Strike-slip", 2.50, 0.419, 0.145, 0.314, 14),
    quad(22, "Active continent", "Strike-slip", 2.65, 0.889, 0.2990, 0.143, 0.295, 14),
};

}  // namespace

RegressionCoeffs fit_length_regression(std::span<const LengthSample> data, bool quadratic) {
    const std::size_t k = quadratic ? 3 : 2;
    const std::size_t n = data.size();
    if (n < k + 1) {
        throw DomainError("fit_length_regression: needs at least " + std::to_string(k + 1) + " samples");
    }
    Eigen::MatrixXd X(n, k);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(data[i].m) || !std::isfinite(data[i].log10_length_km)) {
            throw DomainError("fit_length_regression: non-finite sample");
        }
        const double x = data[i].m - kReferenceMagnitude;
        X(i, 0) = 1.0;
        X(i, 1) = x;
        if (quadratic) X(i, 2) = x * x;
        y(i) = data[i].log10_length_km;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(k)) {
        throw DomainError("fit_length_regression: rank-deficient design (magnitudes too few or collinear)");
    }
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - X * beta;

    RegressionCoeffs c;
    c.a0 = beta(0);
    c.a1 = beta(1);
    c.a2 = quadratic ? beta(2) : 0.0;
    c.n = n;
    c.sigma_err = std::sqrt(resid.squaredNorm() / static_cast<double>(n - k));
    c.eps_max = resid.cwiseAbs().maxCoeff();
    return c;
}

double log10_length(double m, const RegressionCoeffs& c) {
    const double x = m - kReferenceMagnitude;
    return c.a0 + x * (c.a1 + x * c.a2);
}

double predict_zone_length(double m, const RegressionCoeffs& c) { return std::pow(10.0, log10_length(m, c)); }

RegressionCoeffs canonical_length_law() {
    RegressionCoeffs c;
    c.a0 = std::log10(316.0);
    c.a1 = 0.5;
    c.zone = "canonical";
    c.mechanism = "All";
    return c;
}

double zone_area(double length_km, double aspect) {
    if (!(length_km > 0.0) || !std::isfinite(length_km)) throw DomainError("zone_area: requires length > 0");
    if (!(aspect > 0.0 && aspect <= 1.0)) throw DomainError("zone_area: requires 0 < aspect <= 1");
    return std::numbers::pi * aspect * length_km * length_km / 4.0;
}

std::span<const TableRow> table1() { return kTable1; }

const TableRow& table1_row(int row) {
    if (row < 1 || row > static_cast<int>(kTable1.size())) throw DomainError("table1_row: row must be in 1..22");
    return kTable1[static_cast<std::size_t>(row - 1)];
}

std::vector<LengthSample> read_length_samples(std::istream& in) {
    const auto table = csv::read(in, {"m", "L_log10_km"});
    const auto cm = table.column("m");
    const auto cl = table.column("L_log10_km");
    std::vector<LengthSample> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        out.push_back({csv::to_double(row, cm, "m"), csv::to_double(row, cl, "L_log10_km")});
    }
    return out;
}

std::vector<TableRow> read_table(std::istream& in) {
    const auto table = csv::read(in, {"row", "zone", "mechanism", "a0", "a1", "a2", "sigma", "eps_max", "n"});
    std::vector<TableRow> out;
    for (const auto& r : table.rows) {
        TableRow t;
        const double row_no = csv::to_double(r, table.column("row"), "row");
        const double n = csv::to_double(r, table.column("n"), "n");
        if (row_no != std::floor(row_no) || n != std::floor(n) || n < 0) {
            throw ParseError("row and n must be non-negative integers", r.line);
        }
        t.row = static_cast<int>(row_no);
        t.coeffs.zone = r.fields[table.column("zone")];
        t.coeffs.mechanism = r.fields[table.column("mechanism")];
        t.coeffs.a0 = csv::to_double(r, table.column("a0"), "a0");
        t.coeffs.a1 = csv::to_double(r, table.column("a1"), "a1");
        t.quadratic = !r.fields[table.column("a2")].empty();
        if (t.quadratic) t.coeffs.a2 = csv::to_double(r, table.column("a2"), "a2");
        t.coeffs.sigma_err = csv::to_double(r, table.column("sigma"), "sigma");
        t.coeffs.eps_max = csv::to_double(r, table.column("eps_max"), "eps_max");
        t.coeffs.n = static_cast<std::size_t>(n);
        out.push_back(std::move(t));
    }
    return out;
}

void write_table(std::ostream& out, std::span<const TableRow> rows) {
    out << "row,zone,mechanism,a0,a1,a2,sigma,eps_max,n\n";
    for (const auto& r : rows) {
        const auto& c = r.coeffs;
        out << r.row << ',' << c.zone << ',' << c.mechanism << ',' << format_double(c.a0) << ','
            << format_double(c.a1) << ',' << (r.quadratic ? format_double(c.a2) : "") << ','
            << format_double(c.sigma_err) << ',' << format_double(c.eps_max) << ',' << c.n << '\n';
    }
}

}  // namespace quakestat::scaling
