#include <cmath>
#include <cstdlib>
#include <sstream>

#include "qlwave/asymptotic.hpp"

namespace qlwave {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> parse_index_sum(const std::string& field, int line) {
  std::vector<std::string> out;
  for (const auto& raw : split(field, '+')) {
    const std::string idx = trim(raw);
    if (idx.size() > 2) throw GrammarError(line, "derivative multi-index '" + idx + "' longer than 2");
    for (char c : idx) {
      if (c != 't' && c != 'x' && c != 'y' && c != 'z')
        throw GrammarError(line, std::string("unknown coordinate '") + c + "' in '" + idx + "'");
    }
    out.push_back(idx);
  }
  return out;
}

}  // namespace

QuadraticNonlinearity QuadraticNonlinearity::scaled(double lambda) const {
  QuadraticNonlinearity out = *this;
  for (auto& t : out.terms) t.coefficient *= lambda;
  return out;
}

QuadraticNonlinearity parse_nonlinearity(const std::string& text) {
  QuadraticNonlinearity nl;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (const auto& chunk : split(line, ';')) {
      const std::string entry = trim(chunk);
      if (entry.empty()) continue;
      const auto fields = split(entry, ',');
      if (fields.size() != 3)
        throw GrammarError(lineno, "expected 'alpha,beta,coeff', got '" + entry + "'");
      const std::string coeff_text = trim(fields[2]);
      char* end = nullptr;
      const double coeff = std::strtod(coeff_text.c_str(), &end);
      if (coeff_text.empty() || *end != '\0' || !std::isfinite(coeff))
        throw GrammarError(lineno, "invalid coefficient '" + coeff_text + "'");
      for (const auto& a : parse_index_sum(fields[0], lineno)) {
        for (const auto& b : parse_index_sum(fields[1], lineno)) {
          NonlinearTerm t{a, b, coeff};
          if (t.alpha.size() > t.beta.size()) std::swap(t.alpha, t.beta);
          nl.terms.push_back(t);
        }
      }
    }
  }
  return nl;
}

}  // namespace qlwave
