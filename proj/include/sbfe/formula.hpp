#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sbfe/errors.hpp"

namespace sbfe {

// A term is a sorted list of distinct 0-based variable indices.
using Term = std::vector<int>;

// ---------------------------------------------------------------------------
// PartialAssignment: a vector over {0, 1, *}. Fully assigned instances are the
// inputs x; sparse ones serve as certificates, restriction masks and DP states.
// ---------------------------------------------------------------------------
class PartialAssignment {
 public:
  PartialAssignment() = default;
  explicit PartialAssignment(int n) : values_(static_cast<std::size_t>(n), kUnset) {}

  // Parses a string over {0, 1, *}, e.g. "1*0".
  static PartialAssignment from_string(std::string_view s) {
    PartialAssignment b(static_cast<int>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      switch (s[i]) {
        case '0': b.values_[i] = 0; break;
        case '1': b.values_[i] = 1; break;
        case '*': break;
        default:
          throw ParseError("assignment string may contain only 0, 1, *");
      }
    }
    return b;
  }

  // Parses a full bitstring (no '*' allowed).
  static PartialAssignment from_bits(std::string_view s) {
    PartialAssignment b = from_string(s);
    if (!b.fully_assigned()) throw ParseError("bitstring may contain only 0 and 1");
    return b;
  }

  int size() const { return static_cast<int>(values_.size()); }
  bool assigned(int i) const { return values_.at(static_cast<std::size_t>(i)) != kUnset; }
  bool value(int i) const {
    if (!assigned(i)) throw InvalidInputError("variable is unassigned");
    return values_[static_cast<std::size_t>(i)] == 1;
  }

  void set(int i, bool v) { values_.at(static_cast<std::size_t>(i)) = v ? 1 : 0; }
  void clear(int i) { values_.at(static_cast<std::size_t>(i)) = kUnset; }

  bool fully_assigned() const {
    return std::none_of(values_.begin(), values_.end(),
                        [](std::int8_t v) { return v == kUnset; });
  }

  int assigned_count() const {
    return static_cast<int>(std::count_if(values_.begin(), values_.end(),
                                          [](std::int8_t v) { return v != kUnset; }));
  }

  double cost(std::span<const double> costs) const {
    double total = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i] != kUnset) total += costs[i];
    return total;
  }

  // True when every assigned position of *this agrees with x.
  bool contained_in(const PartialAssignment& x) const {
    if (x.size() != size()) return false;
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i] != kUnset &&
          (!x.assigned(static_cast<int>(i)) || x.values_[i] != values_[i]))
        return false;
    return true;
  }

  std::string to_string() const {
    std::string s(values_.size(), '*');
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i] != kUnset) s[i] = values_[i] ? '1' : '0';
    return s;
  }

  friend bool operator==(const PartialAssignment&, const PartialAssignment&) = default;

 private:
  static constexpr std::int8_t kUnset = -1;
  std::vector<std::int8_t> values_;
};

enum class CertificateKind { None, ZeroCert, OneCert };

struct FormulaClass {
  int max_term_size = 0;  // k of "k-DNF"; 0 for constants
  int term_count = 0;     // k of "k-term DNF"; 1 for constants by convention
  bool read_once = false; // every variable appears in at most one term
};

// ---------------------------------------------------------------------------
// DnfFormula: monotone DNF over x0..x{n-1}, or one of the constant formulas.
// The representation has no notion of negation, so monotonicity holds by
// construction. Terms keep first-occurrence order; duplicates are dropped.
// ---------------------------------------------------------------------------
class DnfFormula {
 public:
  static DnfFormula make(int n, std::vector<Term> terms) {
    if (n < 0) throw InvalidInputError("variable count must be nonnegative");
    DnfFormula f;
    f.n_ = n;
    for (Term& t : terms) {
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      if (t.empty()) throw InvalidInputError("empty term; use DnfFormula::constant");
      if (t.front() < 0 || t.back() >= n)
        throw InvalidInputError("variable index out of range");
      if (std::find(f.terms_.begin(), f.terms_.end(), t) == f.terms_.end())
        f.terms_.push_back(std::move(t));
    }
    if (f.terms_.empty()) throw InvalidInputError("no terms; use DnfFormula::constant");
    return f;
  }

  static DnfFormula constant(int n, bool value) {
    DnfFormula f;
    f.n_ = n;
    f.constant_ = value;
    return f;
  }

  int n() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_constant() const { return constant_.has_value(); }
  bool constant_value() const {
    if (!constant_) throw InvalidInputError("formula is not constant");
    return *constant_;
  }

  bool evaluate(const PartialAssignment& x) const {
    check_assignment(x);
    if (!x.fully_assigned()) throw InvalidInputError("assignment is incomplete");
    if (constant_) return *constant_;
    for (const Term& t : terms_) {
      bool sat = true;
      for (int v : t)
        if (!x.value(v)) { sat = false; break; }
      if (sat) return true;
    }
    return false;
  }

  // Substitutes the assigned variables of b: terms containing a 0 are deleted,
  // 1-assigned variables are deleted from their terms. A term that becomes
  // empty makes the result constant 1; no remaining terms make it constant 0.
  // Variable indexing is preserved. Identical residual terms are merged.
  DnfFormula restrict(const PartialAssignment& b) const {
    check_assignment(b);
    if (constant_) return *this;
    DnfFormula out;
    out.n_ = n_;
    for (const Term& t : terms_) {
      Term residual;
      bool dead = false;
      for (int v : t) {
        if (!b.assigned(v)) {
          residual.push_back(v);
        } else if (!b.value(v)) {
          dead = true;
          break;
        }
      }
      if (dead) continue;
      if (residual.empty()) return constant(n_, true);
      if (std::find(out.terms_.begin(), out.terms_.end(), residual) == out.terms_.end())
        out.terms_.push_back(std::move(residual));
    }
    if (out.terms_.empty()) return constant(n_, false);
    return out;
  }

  // Deletes terms that are supersets of other terms (absorption), keeping
  // first-occurrence order. Makes "min-cost term" well defined.
  DnfFormula minimize() const {
    if (constant_) return *this;
    DnfFormula out;
    out.n_ = n_;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      bool absorbed = false;
      for (std::size_t j = 0; j < terms_.size() && !absorbed; ++j) {
        if (i == j) continue;
        // terms_[j] strict subset of terms_[i] (equal terms never stored)
        if (terms_[j].size() < terms_[i].size() &&
            std::includes(terms_[i].begin(), terms_[i].end(),
                          terms_[j].begin(), terms_[j].end()))
          absorbed = true;
      }
      if (!absorbed) out.terms_.push_back(terms_[i]);
    }
    return out;
  }

  // Syntactic certificate check; for monotone DNF this coincides with the
  // semantic definition (b forces f on all completions).
  CertificateKind certificate_kind(const PartialAssignment& b) const {
    check_assignment(b);
    if (constant_) return *constant_ ? CertificateKind::OneCert : CertificateKind::ZeroCert;
    bool all_dead = true;
    for (const Term& t : terms_) {
      bool sat = true;
      bool dead = false;
      for (int v : t) {
        if (!b.assigned(v)) sat = false;
        else if (!b.value(v)) { dead = true; break; }
      }
      if (dead) continue;
      if (sat) return CertificateKind::OneCert;
      all_dead = false;
    }
    return all_dead ? CertificateKind::ZeroCert : CertificateKind::None;
  }

  FormulaClass classify() const {
    FormulaClass c;
    if (constant_) {
      c.term_count = 1;  // constants have size 1
      c.read_once = true;
      return c;
    }
    c.term_count = static_cast<int>(terms_.size());
    std::vector<int> occurrences(static_cast<std::size_t>(n_), 0);
    c.read_once = true;
    for (const Term& t : terms_) {
      c.max_term_size = std::max(c.max_term_size, static_cast<int>(t.size()));
      for (int v : t)
        if (++occurrences[static_cast<std::size_t>(v)] > 1) c.read_once = false;
    }
    return c;
  }

  // Sorted list of variables appearing in some term.
  std::vector<int> variables_used() const {
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    for (const Term& t : terms_)
      for (int v : t) seen[static_cast<std::size_t>(v)] = 1;
    std::vector<int> out;
    for (int v = 0; v < n_; ++v)
      if (seen[static_cast<std::size_t>(v)]) out.push_back(v);
    return out;
  }

  friend bool operator==(const DnfFormula&, const DnfFormula&) = default;

 private:
  DnfFormula() = default;

  void check_assignment(const PartialAssignment& b) const {
    if (b.size() != n_) throw InvalidInputError("assignment length does not match formula");
  }

  int n_ = 0;
  std::vector<Term> terms_;
  std::optional<bool> constant_;
};

// ---------------------------------------------------------------------------
// Text format: one term per line, whitespace-separated tokens x<i> (1-based),
// '#' starts a comment, and a lone TRUE/FALSE line denotes a constant formula.
// Negated literals (!x<i> or ~x<i>) are accepted by the parser but rejected
// on conversion to DnfFormula, which every evaluation algorithm requires.
// ---------------------------------------------------------------------------
struct GeneralLiteral {
  int variable = 0;  // 0-based
  bool negated = false;
};

struct GeneralDnf {
  int n = 0;
  std::optional<bool> constant;
  std::vector<std::vector<GeneralLiteral>> terms;

  bool is_monotone() const {
    for (const auto& t : terms)
      for (const auto& lit : t)
        if (lit.negated) return false;
    return true;
  }

  DnfFormula to_monotone() const {
    if (constant) return DnfFormula::constant(n, *constant);
    std::vector<Term> plain;
    plain.reserve(terms.size());
    for (const auto& t : terms) {
      Term vars;
      for (const auto& lit : t) {
        if (lit.negated)
          throw NotMonotoneError("formula contains negated literal x" +
                                 std::to_string(lit.variable + 1));
        vars.push_back(lit.variable);
      }
      plain.push_back(std::move(vars));
    }
    return DnfFormula::make(n, std::move(plain));
  }
};

inline GeneralDnf parse_dnf_text(std::string_view text) {
  GeneralDnf out;
  bool saw_constant = false;
  bool saw_term = false;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<GeneralLiteral> term;
    std::string tok;
    bool constant_line = false;
    while (tokens >> tok) {
      if (tok == "TRUE" || tok == "FALSE") {
        if (!term.empty()) throw ParseError("constant marker mixed with variables");
        constant_line = true;
        out.constant = (tok == "TRUE");
        continue;
      }
      if (constant_line) throw ParseError("constant marker mixed with variables");
      GeneralLiteral lit;
      std::string_view body = tok;
      if (body.starts_with('!') || body.starts_with('~')) {
        lit.negated = true;
        body.remove_prefix(1);
      }
      if (!body.starts_with('x') && !body.starts_with('X'))
        throw ParseError("bad token '" + tok + "': expected x<i>");
      body.remove_prefix(1);
      if (body.empty() || body.find_first_not_of("0123456789") != std::string_view::npos)
        throw ParseError("bad variable index in token '" + tok + "'");
      const long idx = std::stol(std::string(body));
      if (idx < 1) throw ParseError("variable indices are 1-based");
      lit.variable = static_cast<int>(idx - 1);
      out.n = std::max(out.n, static_cast<int>(idx));
      term.push_back(lit);
    }
    if (constant_line) {
      if (saw_constant || saw_term) throw ParseError("constant marker must be the only line");
      saw_constant = true;
    } else if (!term.empty()) {
      if (saw_constant) throw ParseError("constant marker must be the only line");
      saw_term = true;
      out.terms.push_back(std::move(term));
    }
  }
  if (!saw_constant && !saw_term) throw ParseError("empty formula");
  return out;
}

inline DnfFormula parse_monotone_dnf(std::string_view text) {
  return parse_dnf_text(text).to_monotone();
}

inline std::string to_text(const DnfFormula& f) {
  if (f.is_constant()) return f.constant_value() ? "TRUE\n" : "FALSE\n";
  std::string out;
  for (const Term& t : f.terms()) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out += ' ';
      out += 'x';
      out += std::to_string(t[i] + 1);
    }
    out += '\n';
  }
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline DnfFormula load_monotone_dnf(const std::string& path) {
  return parse_monotone_dnf(read_text_file(path));
}

}  // namespace sbfe
