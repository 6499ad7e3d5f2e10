#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "udiscrim/errors.hpp"
#include "udiscrim/linalg.hpp"
#include "udiscrim/protocol/state.hpp"

namespace udiscrim::protocol {

/// Ordered record of a protocol run. The text form has one event per line:
/// `USE fwd|inv`, `MSG <party> <outcome>`, `VERDICT <index>`.
class Transcript {
 public:
  enum class Kind { Use, Message, Verdict };
  struct Event {
    Kind kind;
    bool inverse = false;
    Party sender = Party::Alice;
    std::size_t value = 0;
  };
  /// Every gate or measurement applied, for the locality audit.
  struct Operation {
    enum class Type { Local, Oracle, Measure } type;
    Party party = Party::Alice;
    std::vector<std::size_t> registers;
    std::vector<Party> owners;  // owner of each listed register
    std::optional<std::size_t> after_message;  // event index the action depends on
  };

  void use(bool inverse) { events_.push_back({Kind::Use, inverse, Party::Alice, 0}); }
  std::size_t message(Party from, std::size_t outcome) {
    events_.push_back({Kind::Message, false, from, outcome});
    return events_.size() - 1;
  }
  void verdict(std::size_t index) { events_.push_back({Kind::Verdict, false, Party::Alice, index}); }
  void record(Operation op) { ops_.push_back(std::move(op)); }

  const std::vector<Event>& events() const { return events_; }
  const std::vector<Operation>& operations() const { return ops_; }

  void append(const Transcript& other) {
    const std::size_t shift = events_.size();
    events_.insert(events_.end(), other.events_.begin(), other.events_.end());
    for (auto op : other.ops_) {
      if (op.after_message) *op.after_message += shift;
      ops_.push_back(std::move(op));
    }
  }

  std::string to_text() const {
    std::ostringstream os;
    for (const auto& e : events_) {
      switch (e.kind) {
        case Kind::Use: os << "USE " << (e.inverse ? "inv" : "fwd") << '\n'; break;
        case Kind::Message: os << "MSG " << party_name(e.sender) << ' ' << e.value << '\n'; break;
        case Kind::Verdict: os << "VERDICT " << e.value << '\n'; break;
      }
    }
    return os.str();
  }

 private:
  std::vector<Event> events_;
  std::vector<Operation> ops_;
};

/// Black box holding one of several hypotheses. The choice is only readable
/// through reveal_for_scoring().
class Oracle {
 public:
  Oracle(std::vector<linalg::UnitaryGate> hypotheses, std::uint64_t seed, bool allow_inverse = true)
      : hyps_(std::move(hypotheses)), allow_inverse_(allow_inverse) {
    validate();
    hidden_ = linalg::split_seed(seed, kHiddenStream) % hyps_.size();
  }

  static Oracle with_hidden(std::vector<linalg::UnitaryGate> hypotheses, std::size_t hidden,
                            bool allow_inverse = true) {
    Oracle o(std::move(hypotheses), 0, allow_inverse);
    if (hidden >= o.hyps_.size()) throw InputError("hidden index out of range");
    o.hidden_ = hidden;
    return o;
  }

  const std::vector<linalg::UnitaryGate>& hypotheses() const { return hyps_; }
  std::size_t size() const { return hyps_.size(); }
  std::size_t uses() const { return uses_; }
  bool allow_inverse() const { return allow_inverse_; }

  /// Applies the hidden gate (or its inverse) to the target registers.
  void invoke(RegisterState& state, std::span<const std::size_t> targets, bool inverse,
              Transcript& log) {
    if (inverse && !allow_inverse_) throw InputError("oracle does not allow inverse use");
    const auto& m = hyps_[hidden_].matrix();
    state.apply(inverse ? m.adjoint() : m, targets);
    ++uses_;
    log.use(inverse);
    std::vector<Party> owners;
    for (auto t : targets) owners.push_back(state.registers()[t].owner);
    log.record({Transcript::Operation::Type::Oracle, Party::Alice,
                std::vector<std::size_t>(targets.begin(), targets.end()), owners, std::nullopt});
  }

  std::size_t reveal_for_scoring() const { return hidden_; }

 private:
  static constexpr std::uint64_t kHiddenStream = 0x68696464656eULL;

  void validate() const {
    if (hyps_.size() < 2) throw InputError("oracle needs at least two hypotheses");
    for (const auto& h : hyps_)
      if (h.structure() != hyps_.front().structure())
        throw InputError("all hypotheses must share one party structure");
  }

  std::vector<linalg::UnitaryGate> hyps_;
  bool allow_inverse_;
  std::size_t hidden_ = 0;
  std::size_t uses_ = 0;
};

/// True when every local gate and measurement touches only its party's
/// registers and each Bob measurement follows an Alice message.
inline bool audit_locality(const Transcript& t) {
  for (const auto& op : t.operations()) {
    if (op.type == Transcript::Operation::Type::Oracle) continue;
    if (op.owners.size() != op.registers.size()) return false;
    for (auto owner : op.owners)
      if (owner != op.party) return false;
    if (op.type == Transcript::Operation::Type::Measure && op.party == Party::Bob) {
      if (!op.after_message) return false;
      const auto& e = t.events().at(*op.after_message);
      if (e.kind != Transcript::Kind::Message || e.sender != Party::Alice) return false;
    }
  }
  return true;
}

}  // namespace udiscrim::protocol
