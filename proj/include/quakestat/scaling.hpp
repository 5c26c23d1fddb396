#pragma once

// Aftershock-zone length scaling: log10 length (km) as a polynomial in
// (m - 8.25), the published regression table, and the focal-zone area.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace quakestat::scaling {

inline constexpr double kReferenceMagnitude = 8.25;

struct RegressionCoeffs {
    double a0 = 0.0;
    double a1 = 0.0;
    /// Zero for the linear form.
    double a2 = 0.0;
    /// Residual standard error, sqrt(RSS / (n - parameters)).
    double sigma_err = 0.0;
    /// Largest absolute residual.
    double eps_max = 0.0;
    std::size_t n = 0;
    std::string zone;
    std::string mechanism;
};

struct LengthSample {
    double m = 0.0;
    double log10_length_km = 0.0;
};

/// Least squares (column-pivoted QR) on
/// L = a0 + a1 (m - 8.25) + a2 (m - 8.25)^2, with a2 fixed at 0 unless
/// `quadratic`.  Needs n >= 3 (linear) or n >= 4 (quadratic) and throws
/// DomainError when the design is rank deficient.
RegressionCoeffs fit_length_regression(std::span<const LengthSample> data, bool quadratic);

/// a0 + a1 (m - 8.25) + a2 (m - 8.25)^2.
double log10_length(double m, const RegressionCoeffs& c);

/// 10^log10_length(m), km.
double predict_zone_length(double m, const RegressionCoeffs& c);

/// a = 316 * 10^((m - 8.25) / 2) km: length proportional to moment^(1/3).
RegressionCoeffs canonical_length_law();

/// Ellipse with full major axis `length_km` and full minor axis
/// aspect * length_km: pi aspect length^2 / 4 km^2.
double zone_area(double length_km, double aspect = 0.25);

struct TableRow {
    int row = 0;
    bool quadratic = false;
    RegressionCoeffs coeffs;
};

/// The 22 published regressions (1977-2010 catalog), in table order.
std::span<const TableRow> table1();

/// Row by its 1-based number; throws DomainError outside 1..22.
const TableRow& table1_row(int row);

/// CSV with columns m,L_log10_km.
std::vector<LengthSample> read_length_samples(std::istream& in);

/// CSV with columns row,zone,mechanism,a0,a1,a2,sigma,eps_max,n; an empty a2
/// marks a linear row.
std::vector<TableRow> read_table(std::istream& in);

void write_table(std::ostream& out, std::span<const TableRow> rows);

}  // namespace quakestat::scaling
