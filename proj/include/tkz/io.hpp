#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "tkz/change.hpp"
#include "tkz/connection.hpp"
#include "tkz/frobenius.hpp"
#include "tkz/singular.hpp"
#include "tkz/transport.hpp"

namespace tkz::io {

using json = nlohmann::json;

// Complex numbers are [re, im]; plain numbers are accepted on input.
json to_json(cplx z);
cplx complex_from(const json& j);

// Rationals are {"num": p, "den": q}; integers and "p/q" strings are accepted on input.
json to_json(const Rational& r);
Rational rational_from(const json& j);

// Matrices are arrays of rows of complex entries.
json to_json(const CMatrix& m);
CMatrix matrix_from(const json& j);
json to_json(const std::vector<cplx>& v);
std::vector<cplx> cvector_from(const json& j);
/// Non-finite doubles are written as the strings "inf", "-inf" and "nan".
json real_to_json(double x);
double real_from(const json& j);

json to_json(const rcalc::RElement& f);
rcalc::RElement relement_from(const json& j);
json to_json(const rcalc::RMatrix& m);
rcalc::RMatrix rmatrix_from(const json& j);

json to_json(const connection::ConnectionSystem& conn);
connection::ConnectionSystem connection_from(const json& j);

json to_json(const ChangeOfVariables& cov);
ChangeOfVariables change_from(const json& j);

json to_json(const rcalc::MatrixSeries& s);
rcalc::MatrixSeries matrix_series_from(const json& j);

json to_json(const singular::TransformedSystem& ts);
singular::TransformedSystem transformed_from(const json& j);

json to_json(const singular::Verdict& v);
json to_json(const singular::IndicialData& d);
json to_json(const frobenius::FrobeniusSolution& sol);

json to_json(const transport::PathSpec& p);
transport::PathSpec path_from(const json& j);

/// Reads and parses a JSON file; failures are ConfigErrors naming the file.
json read_file(const std::string& path);
/// Writes with two-space indentation and a trailing newline.
void write_file(const std::string& path, const json& j);
void write_text(const std::string& path, const std::string& text);

}  // namespace tkz::io
