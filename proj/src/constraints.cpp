#include "holorepair/constraints.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "holorepair/errors.hpp"

namespace holorepair {

const char* op_name(Op op) {
    switch (op) {
        case Op::EQ: return "EQ";
        case Op::IQ: return "IQ";
        case Op::LT: return "LT";
        case Op::GT: return "GT";
        case Op::LTE: return "LTE";
        case Op::GTE: return "GTE";
        case Op::SIM: return "SIM";
    }
    return "?";
}

bool eval_op(Op op, const std::string* lhs, const std::string* rhs, double sim_threshold) {
    if (!lhs || !rhs) return false;
    switch (op) {
        case Op::EQ: return *lhs == *rhs;
        case Op::IQ: return *lhs != *rhs;
        case Op::SIM: return similarity(*lhs, *rhs) >= sim_threshold;
        default: break;
    }
    auto a = parse_decimal(*lhs);
    auto b = parse_decimal(*rhs);
    if (!a || !b) return false;
    switch (op) {
        case Op::LT: return *a < *b;
        case Op::GT: return *a > *b;
        case Op::LTE: return *a <= *b;
        case Op::GTE: return *a >= *b;
        default: return false;
    }
}

namespace {

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;

    bool done() const { return pos >= s.size(); }
    char peek() const { return pos < s.size() ? s[pos] : '\0'; }
    bool consume(std::string_view tok) {
        if (s.compare(pos, tok.size(), tok) == 0) {
            pos += tok.size();
            return true;
        }
        return false;
    }
    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos); }
};

std::optional<Op> lookup_op(std::string_view name) {
    static constexpr std::array<std::pair<std::string_view, Op>, 7> table{{
        {"EQ", Op::EQ}, {"IQ", Op::IQ}, {"LTE", Op::LTE}, {"GTE", Op::GTE},
        {"LT", Op::LT}, {"GT", Op::GT}, {"SIM", Op::SIM},
    }};
    for (auto [n, o] : table)
        if (n == name) return o;
    return std::nullopt;
}

Operand parse_operand(Cursor& c, int arity) {
    c.skip_ws();
    if (c.consume("t1.") || c.consume("t2.")) {
        int slot = c.s[c.pos - 2] == '1' ? 0 : 1;
        if (slot == 1 && arity < 2) {
            c.pos -= 3;
            c.fail("t2 referenced in an arity-1 constraint");
        }
        std::size_t start = c.pos;
        while (!c.done() && c.peek() != ',' && c.peek() != ')') ++c.pos;
        std::string attr(c.s, start, c.pos - start);
        while (!attr.empty() && (attr.back() == ' ' || attr.back() == '\t')) attr.pop_back();
        if (attr.empty()) c.fail("empty attribute name");
        return Operand::tuple_attr(slot, std::move(attr));
    }
    if (c.peek() == '"') {
        ++c.pos;
        std::size_t start = c.pos;
        while (!c.done() && c.peek() != '"') ++c.pos;
        if (c.done()) c.fail("unterminated string literal");
        std::string lit(c.s, start, c.pos - start);
        ++c.pos;
        return Operand::constant(std::move(lit), /*quoted=*/true);
    }
    std::size_t start = c.pos;
    while (!c.done() && (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '.' ||
                         c.peek() == '-' || c.peek() == '+' || c.peek() == 'e' || c.peek() == 'E'))
        ++c.pos;
    if (c.pos == start) c.fail("expected operand");
    std::string num(c.s, start, c.pos - start);
    if (!parse_decimal(num)) throw ParseError("malformed number '" + num + "'", start);
    return Operand::constant(std::move(num), /*quoted=*/false);
}

Predicate parse_predicate(Cursor& c, int arity) {
    c.skip_ws();
    std::size_t start = c.pos;
    while (!c.done() && std::isalpha(static_cast<unsigned char>(c.peek()))) ++c.pos;
    std::string name(c.s, start, c.pos - start);
    auto op = lookup_op(name);
    if (!op) throw ParseError("unknown operator '" + name + "'", start);
    c.skip_ws();
    if (!c.consume("(")) c.fail("expected '(' after operator");
    Predicate p;
    p.op = *op;
    p.lhs = parse_operand(c, arity);
    c.skip_ws();
    if (c.peek() == ')') c.fail("predicate takes two operands (arity of " + name + ")");
    if (!c.consume(",")) c.fail("expected ',' between operands");
    p.rhs = parse_operand(c, arity);
    c.skip_ws();
    if (!c.consume(")")) c.fail("unbalanced parentheses: expected ')'");
    return p;
}

}  // namespace

DenialConstraint parse_dc(const std::string& line) {
    Cursor c{line};
    DenialConstraint dc;
    c.skip_ws();
    if (!c.consume("t1&")) c.fail("constraint must start with 't1&' or 't1&t2&'");
    dc.arity = c.consume("t2&") ? 2 : 1;
    while (true) {
        dc.predicates.push_back(parse_predicate(c, dc.arity));
        c.skip_ws();
        if (c.done()) break;
        if (!c.consume("&")) c.fail("expected '&' between predicates");
    }
    if (dc.predicates.empty()) c.fail("empty predicate list");
    if (dc.arity == 2) {
        bool uses_t2 = false;
        for (const auto& p : dc.predicates) {
            if (p.lhs.kind == Operand::Kind::TupleAttr && p.lhs.slot == 1) uses_t2 = true;
            if (p.rhs.kind == Operand::Kind::TupleAttr && p.rhs.slot == 1) uses_t2 = true;
        }
        if (!uses_t2) throw ParseError("arity-2 constraint never references t2", 0);
    }
    return dc;
}

static void render_operand(std::string& out, const Operand& o) {
    if (o.kind == Operand::Kind::TupleAttr) {
        out += o.slot == 0 ? "t1." : "t2.";
        out += o.attr;
    } else if (o.quoted) {
        out += '"';
        out += o.text;
        out += '"';
    } else {
        out += o.text;
    }
}

std::string render_dc(const DenialConstraint& dc) {
    std::string out = dc.arity == 2 ? "t1&t2&" : "t1&";
    for (std::size_t i = 0; i < dc.predicates.size(); ++i) {
        if (i) out += '&';
        const auto& p = dc.predicates[i];
        out += op_name(p.op);
        out += '(';
        render_operand(out, p.lhs);
        out += ',';
        render_operand(out, p.rhs);
        out += ')';
    }
    return out;
}

static std::string trimmed(const std::string& s, std::size_t b, std::size_t e) {
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return s.substr(b, e - b);
}

MatchingDependency parse_md(const std::string& line) {
    std::size_t arrow = line.find("=>");
    if (arrow == std::string::npos) throw ParseError("matching dependency lacks '=>'", line.size());

    MatchingDependency md;
    Cursor c{line};
    c.skip_ws();
    if (!c.consume("dict=")) c.fail("matching dependency must start with 'dict='");
    std::size_t id_start = c.pos;
    while (!c.done() && c.peek() != ':') ++c.pos;
    if (c.done()) c.fail("expected ':' after dictionary id");
    md.dict_id = trimmed(line, id_start, c.pos);
    if (md.dict_id.empty()) throw ParseError("empty dictionary id", id_start);
    ++c.pos;  // ':'

    // conditions between here and "=>"
    std::size_t cond_begin = c.pos;
    while (cond_begin < arrow) {
        std::size_t cond_end = line.find('&', cond_begin);
        if (cond_end == std::string::npos || cond_end > arrow) cond_end = arrow;
        std::size_t sep = line.find_first_of("=~", cond_begin);
        if (sep == std::string::npos || sep >= cond_end)
            throw ParseError("condition lacks '=' or '~'", cond_begin);
        MdCondition cond;
        cond.attr = trimmed(line, cond_begin, sep);
        cond.op = line[sep] == '~' ? MatchOp::Similar : MatchOp::Exact;
        cond.dict_attr = trimmed(line, sep + 1, cond_end);
        if (cond.attr.empty() || cond.dict_attr.empty())
            throw ParseError("empty attribute in condition", cond_begin);
        md.conditions.push_back(std::move(cond));
        cond_begin = cond_end + (cond_end < arrow ? 1 : 0);
        if (cond_begin == arrow) break;
    }
    if (md.conditions.empty()) throw ParseError("empty condition list", c.pos);

    std::size_t assign = line.find(":=", arrow + 2);
    if (assign == std::string::npos) throw ParseError("assignment lacks ':='", line.size());
    md.target_attr = trimmed(line, arrow + 2, assign);
    md.source_dict_attr = trimmed(line, assign + 2, line.size());
    if (md.target_attr.empty() || md.source_dict_attr.empty())
        throw ParseError("empty attribute in assignment", assign);
    return md;
}

namespace {

template <class T, class ParseFn>
std::vector<T> parse_lines(const std::string& text, const std::string& origin, ParseFn fn) {
    std::vector<T> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            out.push_back(fn(line, out.size()));
        } catch (const ParseError& e) {
            throw ParseError(origin + ":" + std::to_string(line_no) + ": " + e.what(), e.column);
        }
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::vector<DenialConstraint> parse_dc_file(const std::string& text, const std::string& origin) {
    return parse_lines<DenialConstraint>(text, origin, [](const std::string& line, std::size_t i) {
        DenialConstraint dc = parse_dc(line);
        dc.id = "dc" + std::to_string(i + 1);
        return dc;
    });
}

std::vector<DenialConstraint> load_dcs(const std::string& path) {
    return parse_dc_file(slurp(path), path);
}

std::vector<MatchingDependency> parse_md_file(const std::string& text, const std::string& origin) {
    return parse_lines<MatchingDependency>(text, origin,
                                           [](const std::string& line, std::size_t) {
                                               return parse_md(line);
                                           });
}

std::vector<MatchingDependency> load_mds(const std::string& path) {
    return parse_md_file(slurp(path), path);
}

}  // namespace holorepair
