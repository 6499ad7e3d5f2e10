#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "udiscrim/errors.hpp"
#include "udiscrim/linalg.hpp"

namespace udiscrim::protocol {

enum class Party { Alice, Bob };

inline const char* party_name(Party p) { return p == Party::Alice ? "A" : "B"; }

struct Register {
  std::string name;
  std::size_t dim;
  Party owner;
};

/// Pure state over a list of registers, each owned by one party.
class RegisterState {
 public:
  RegisterState() = default;

  /// Product of an Alice state and a Bob state; each covers that party's
  /// registers in list order.
  RegisterState(std::vector<Register> regs, const Vector& alice, const Vector& bob)
      : regs_(std::move(regs)) {
    if (party_dim(Party::Alice) != alice.size() || party_dim(Party::Bob) != bob.size())
      throw InputError("local state dimension does not match the registers");
    amps_.assign(total_dim(), Complex{});
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      const auto [a, b] = split_index(i);
      amps_[i] = alice[a] * bob[b];
    }
  }

  const std::vector<Register>& registers() const { return regs_; }
  const Vector& amplitudes() const { return amps_; }

  std::size_t total_dim() const {
    std::size_t d = 1;
    for (const auto& r : regs_) d *= r.dim;
    return d;
  }

  std::size_t party_dim(Party p) const {
    std::size_t d = 1;
    for (const auto& r : regs_)
      if (r.owner == p) d *= r.dim;
    return d;
  }

  std::vector<std::size_t> party_registers(Party p) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < regs_.size(); ++k)
      if (regs_[k].owner == p) out.push_back(k);
    return out;
  }

  /// Applies `op` to the listed registers (tensor order as listed).
  void apply(const Matrix& op, std::span<const std::size_t> targets) {
    const std::size_t n = regs_.size();
    std::vector<std::size_t> stride(n);
    std::size_t s = 1;
    for (std::size_t k = n; k-- > 0;) {
      stride[k] = s;
      s *= regs_[k].dim;
    }
    std::vector<bool> is_target(n, false);
    std::size_t tdim = 1;
    for (auto t : targets) {
      if (t >= n || is_target[t]) throw InputError("invalid target registers");
      is_target[t] = true;
      tdim *= regs_[t].dim;
    }
    if (op.rows() != tdim || op.cols() != tdim) throw InputError("operator dimension mismatch");

    std::vector<std::size_t> offsets(tdim);
    for (std::size_t j = 0; j < tdim; ++j) {
      std::size_t rem = j, off = 0;
      for (std::size_t k = targets.size(); k-- > 0;) {
        off += (rem % regs_[targets[k]].dim) * stride[targets[k]];
        rem /= regs_[targets[k]].dim;
      }
      offsets[j] = off;
    }
    std::vector<std::size_t> bases{0};
    for (std::size_t k = 0; k < n; ++k) {
      if (is_target[k]) continue;
      std::vector<std::size_t> next;
      for (auto b : bases)
        for (std::size_t x = 0; x < regs_[k].dim; ++x) next.push_back(b + x * stride[k]);
      bases = std::move(next);
    }
    Vector in(tdim);
    for (auto b : bases) {
      for (std::size_t j = 0; j < tdim; ++j) in[j] = amps_[b + offsets[j]];
      for (std::size_t i = 0; i < tdim; ++i) {
        Complex acc{};
        for (std::size_t j = 0; j < tdim; ++j) acc += op(i, j) * in[j];
        amps_[b + offsets[i]] = acc;
      }
    }
  }

  /// Coefficient matrix Psi[a][b] with Alice's registers as the row index.
  Matrix bipartite() const {
    Matrix m(party_dim(Party::Alice), party_dim(Party::Bob));
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      const auto [a, b] = split_index(i);
      m(a, b) = amps_[i];
    }
    return m;
  }

 private:
  std::pair<std::size_t, std::size_t> split_index(std::size_t i) const {
    std::size_t a = 0, b = 0, sa = 1, sb = 1;
    for (std::size_t k = regs_.size(); k-- > 0;) {
      const std::size_t digit = i % regs_[k].dim;
      i /= regs_[k].dim;
      if (regs_[k].owner == Party::Alice) {
        a += digit * sa;
        sa *= regs_[k].dim;
      } else {
        b += digit * sb;
        sb *= regs_[k].dim;
      }
    }
    return {a, b};
  }

  std::vector<Register> regs_;
  Vector amps_;
};

}  // namespace udiscrim::protocol
