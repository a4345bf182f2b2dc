#include "safepool/core.hpp"

#include <algorithm>

namespace safepool {

std::string to_string(Wei v)
{
    if (v == 0) return "0";
    std::string out;
    while (v > 0) {
        out.push_back(char('0' + int(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string to_string(SignedWei v)
{
    if (v < 0) return "-" + to_string(Wei(-v));
    return to_string(Wei(v));
}

Wei parse_wei(std::string_view text)
{
    if (text.empty()) throw std::invalid_argument("empty integer");
    constexpr Wei kMax = ~Wei(0);
    Wei v = 0;
    for (char c : text) {
        if (c < '0' || c > '9') throw std::invalid_argument("not a decimal integer: " + std::string(text));
        const unsigned d = unsigned(c - '0');
        if (v > (kMax - d) / 10) throw std::invalid_argument("integer overflow: " + std::string(text));
        v = v * 10 + d;
    }
    return v;
}

double to_double(Wei v)
{
    const auto hi = std::uint64_t(v >> 64);
    const auto lo = std::uint64_t(v);
    return double(hi) * 18446744073709551616.0 + double(lo);
}

std::string_view label_name(Label l)
{
    return l == Label::benign ? "benign" : "adversarial";
}

Label parse_label(std::string_view s)
{
    if (s == "benign") return Label::benign;
    if (s == "adversarial") return Label::adversarial;
    throw std::invalid_argument("unknown source label: " + std::string(s));
}

void validate(const Transaction& tx)
{
    if (tx.price == 0) throw std::invalid_argument("transaction price must be positive");
    if (tx.gas_used < kMinTxGas) throw std::invalid_argument("gas_used below 21000");
    if (tx.gas_used > tx.gas_limit) throw std::invalid_argument("gas_used exceeds gas_limit");
}

Transaction make_transaction(Account sender, Nonce nonce, std::uint64_t price, Gas gas_used,
                             Gas gas_limit, std::uint64_t value, Label label, TxId id)
{
    Transaction tx;
    tx.id = id;
    tx.sender = std::move(sender);
    tx.nonce = nonce;
    tx.price = price;
    tx.gas_used = gas_used;
    tx.gas_limit = gas_limit == 0 ? gas_used : gas_limit;
    tx.value = value;
    tx.label = label;
    validate(tx);
    return tx;
}

AccountState WorldState::account(const Account& a) const
{
    auto it = accounts.find(a);
    if (it != accounts.end()) return it->second;
    return AccountState{default_balance, 0};
}

AccountState& WorldState::mutable_account(const Account& a)
{
    auto it = accounts.find(a);
    if (it == accounts.end()) it = accounts.emplace(a, AccountState{default_balance, 0}).first;
    return it->second;
}

std::string_view reason_name(Reason r)
{
    switch (r) {
    case Reason::invalid_stale: return "invalid-stale";
    case Reason::invalid_duplicate: return "invalid-duplicate";
    case Reason::invalid_future: return "invalid-future";
    case Reason::invalid_overdraft: return "invalid-overdraft";
    case Reason::price_too_low: return "price-too-low";
    case Reason::fee_too_low: return "fee-too-low";
    case Reason::ancestor_victim: return "ancestor-victim";
    case Reason::sender_limit: return "sender-limit";
    case Reason::pool_not_full: return "pool-not-full";
    case Reason::eviction: return "eviction";
    case Reason::unbuildable: return "unbuildable";
    }
    return "?";
}

std::string_view outcome_kind_name(OutcomeKind k)
{
    switch (k) {
    case OutcomeKind::declined: return "declined";
    case OutcomeKind::admitted_no_evict: return "admitted";
    case OutcomeKind::admitted_evicting: return "admitted-evicting";
    }
    return "?";
}

} // namespace safepool
