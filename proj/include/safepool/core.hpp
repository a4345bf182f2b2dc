#pragma once

// Domain types shared by the pool engine, policies, block builder and
// harness. Monetary amounts are unsigned 128-bit integers; no floating
// point is used anywhere on the admission path.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace safepool {

using Wei = unsigned __int128;
using SignedWei = __int128;
using Gas = std::uint64_t;
using Nonce = std::uint64_t;
using TxId = std::uint64_t;
using Account = std::string;

inline constexpr Gas kMinTxGas = 21000;
inline constexpr Gas kDefaultBlockGasLimit = 30'000'000;

std::string to_string(Wei v);
std::string to_string(SignedWei v);
/// Parses a non-negative decimal integer; throws std::invalid_argument.
Wei parse_wei(std::string_view text);
/// Lossy conversion for reports only.
double to_double(Wei v);

enum class Label { benign, adversarial };

std::string_view label_name(Label l);
Label parse_label(std::string_view s);

struct Transaction {
    TxId id = 0;
    Account sender;
    Nonce nonce = 0;
    std::uint64_t price = 1;   // wei per gas
    Gas gas_used = kMinTxGas;
    Gas gas_limit = kMinTxGas;
    std::uint64_t value = 0;   // wei transferred
    Label label = Label::benign;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Builds a transaction and enforces the type invariants
/// (price > 0, 21000 <= gas_used <= gas_limit).
Transaction make_transaction(Account sender, Nonce nonce, std::uint64_t price,
                             Gas gas_used = kMinTxGas, Gas gas_limit = 0,
                             std::uint64_t value = 0, Label label = Label::benign,
                             TxId id = 0);

/// Throws std::invalid_argument if `tx` violates the type invariants.
void validate(const Transaction& tx);

inline Wei fee(const Transaction& tx) { return Wei(tx.gas_used) * tx.price; }

/// Balance reservation used by the overdraft check: worst-case gas plus value.
inline Wei cost(const Transaction& tx) { return Wei(tx.gas_limit) * tx.price + tx.value; }

/// Same sender and strictly lower nonce.
inline bool is_ancestor(const Transaction& a, const Transaction& b)
{
    return a.sender == b.sender && a.nonce < b.nonce;
}

struct AccountState {
    Wei balance = 0;
    Nonce nonce = 0;   // next expected nonce
};

struct WorldState {
    std::map<Account, AccountState> accounts;
    Gas block_gas_limit = kDefaultBlockGasLimit;
    // Balance given to accounts that were never configured explicitly.
    Wei default_balance = 0;

    AccountState account(const Account& a) const;
    AccountState& mutable_account(const Account& a);
    Nonce nonce_of(const Account& a) const { return account(a).nonce; }
    Wei balance_of(const Account& a) const { return account(a).balance; }
};

struct Block {
    std::vector<Transaction> txs;
    std::vector<Gas> gas;      // effective gas of each entry of txs
    Gas gas_total = 0;
    Wei revenue = 0;
};

/// Causes attached to outcomes and to the declined ledger.
enum class Reason {
    invalid_stale,
    invalid_duplicate,
    invalid_future,
    invalid_overdraft,
    price_too_low,
    fee_too_low,
    ancestor_victim,   // the only eligible victim is the arriving tx's own ancestor
    sender_limit,
    pool_not_full,
    eviction,
    unbuildable,
};

std::string_view reason_name(Reason r);

enum class OutcomeKind { declined, admitted_no_evict, admitted_evicting };

std::string_view outcome_kind_name(OutcomeKind k);

struct AdmissionOutcome {
    OutcomeKind kind = OutcomeKind::declined;
    Reason reason = Reason::invalid_future;
    std::vector<Transaction> victims;

    bool admitted() const { return kind != OutcomeKind::declined; }
};

struct DeclinedEntry {
    Transaction tx;
    Reason reason;
};

} // namespace safepool
