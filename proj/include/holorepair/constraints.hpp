#pragma once

#include <string>
#include <vector>

#include "holorepair/text.hpp"

namespace holorepair {

/// Predicate operators. IQ is inequality (!=), SIM is approximate string
/// match against the global similarity threshold.
enum class Op { EQ, IQ, LT, GT, LTE, GTE, SIM };

const char* op_name(Op op);

/// NULL never satisfies a predicate, including IQ. The ordering operators
/// require both operands to parse as decimals; otherwise they are false.
bool eval_op(Op op, const std::string* lhs, const std::string* rhs, double sim_threshold);

inline bool eval_op(Op op, const Value& lhs, const Value& rhs, double sim_threshold) {
    return eval_op(op, lhs ? &*lhs : nullptr, rhs ? &*rhs : nullptr, sim_threshold);
}

struct Operand {
    enum class Kind { TupleAttr, Const };
    Kind kind = Kind::Const;
    int slot = 0;       // 0 = t1, 1 = t2 (TupleAttr only)
    std::string attr;   // TupleAttr only
    std::string text;   // Const only
    bool quoted = false;  // Const was a quoted string, not a bare number

    static Operand tuple_attr(int slot, std::string attr) {
        Operand o;
        o.kind = Kind::TupleAttr;
        o.slot = slot;
        o.attr = std::move(attr);
        return o;
    }
    static Operand constant(std::string text, bool quoted) {
        Operand o;
        o.kind = Kind::Const;
        o.text = std::move(text);
        o.quoted = quoted;
        return o;
    }
    friend bool operator==(const Operand&, const Operand&) = default;
};

struct Predicate {
    Op op = Op::EQ;
    Operand lhs;
    Operand rhs;
    friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// forall t1[,t2]: not(P_1 and ... and P_K)
struct DenialConstraint {
    std::string id;
    int arity = 2;  // quantified tuple variables, 1 or 2
    std::vector<Predicate> predicates;
    friend bool operator==(const DenialConstraint&, const DenialConstraint&) = default;
};

enum class MatchOp { Exact, Similar };

struct MdCondition {
    std::string attr;       // dataset attribute
    MatchOp op = MatchOp::Exact;
    std::string dict_attr;  // dictionary attribute
    friend bool operator==(const MdCondition&, const MdCondition&) = default;
};

/// If all conditions hold between a dataset tuple and a dictionary row, the
/// target attribute should take the dictionary row's source value.
struct MatchingDependency {
    std::string dict_id;
    std::vector<MdCondition> conditions;
    std::string target_attr;
    std::string source_dict_attr;
    friend bool operator==(const MatchingDependency&, const MatchingDependency&) = default;
};

/// Grammar: ("t1&t2&" | "t1&") pred ("&" pred)*
///          pred    := OP "(" operand "," operand ")"
///          operand := ("t1." | "t2.") attr | '"' literal '"' | number
DenialConstraint parse_dc(const std::string& line);

/// Canonical renderer; parse_dc(render_dc(dc)) == dc for ids left empty.
std::string render_dc(const DenialConstraint& dc);

/// Grammar: "dict=" id ":" cond ("&" cond)* "=>" attr ":=" extattr
///          cond := attr ("=" | "~") extattr
MatchingDependency parse_md(const std::string& line);

/// One constraint per line; '#' starts a comment line; blank lines skipped.
/// Constraints are assigned ids dc1, dc2, ... in file order.
std::vector<DenialConstraint> load_dcs(const std::string& path);
std::vector<DenialConstraint> parse_dc_file(const std::string& text,
                                            const std::string& origin = "<string>");

std::vector<MatchingDependency> load_mds(const std::string& path);
std::vector<MatchingDependency> parse_md_file(const std::string& text,
                                              const std::string& origin = "<string>");

}  // namespace holorepair
