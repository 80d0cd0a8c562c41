#include "slrkit/mso.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "slrkit/error.hpp"

namespace slrkit {

MsoFormula MsoFormula::truth()
{
    return MsoFormula{};
}

MsoFormula MsoFormula::falsity()
{
    return MsoFormula{Kind::False, {}, {}, 0, {}};
}

MsoFormula MsoFormula::eq(std::string x, std::string y)
{
    return MsoFormula{Kind::Eq, {}, {std::move(x), std::move(y)}, 0, {}};
}

MsoFormula MsoFormula::edg(std::string label, std::vector<std::string> args)
{
    return MsoFormula{Kind::Edg, std::move(label), std::move(args), 0, {}};
}

MsoFormula MsoFormula::member(std::string set, std::string x)
{
    return MsoFormula{Kind::Member, std::move(set), {std::move(x)}, 0, {}};
}

MsoFormula MsoFormula::is_vertex(std::string x)
{
    return MsoFormula{Kind::IsVertex, {}, {std::move(x)}, 0, {}};
}

MsoFormula MsoFormula::incid(std::string label, std::size_t position, std::string edge, std::string vertex)
{
    return MsoFormula{Kind::Incid, std::move(label), {std::move(edge), std::move(vertex)}, position, {}};
}

MsoFormula MsoFormula::negate(MsoFormula f)
{
    MsoFormula out{Kind::Not, {}, {}, 0, {}};
    out.children.push_back(std::move(f));
    return out;
}

MsoFormula MsoFormula::conj(std::vector<MsoFormula> parts)
{
    if (parts.empty()) {
        return truth();
    }
    if (parts.size() == 1) {
        return std::move(parts.front());
    }
    return MsoFormula{Kind::And, {}, {}, 0, std::move(parts)};
}

MsoFormula MsoFormula::disj(std::vector<MsoFormula> parts)
{
    if (parts.empty()) {
        return falsity();
    }
    if (parts.size() == 1) {
        return std::move(parts.front());
    }
    return MsoFormula{Kind::Or, {}, {}, 0, std::move(parts)};
}

MsoFormula MsoFormula::implies(MsoFormula a, MsoFormula b)
{
    std::vector<MsoFormula> parts;
    parts.push_back(negate(std::move(a)));
    parts.push_back(std::move(b));
    return disj(std::move(parts));
}

MsoFormula MsoFormula::iff(MsoFormula a, MsoFormula b)
{
    std::vector<MsoFormula> parts;
    parts.push_back(implies(a, b));
    parts.push_back(implies(std::move(b), std::move(a)));
    return conj(std::move(parts));
}

namespace {

MsoFormula quantifier(MsoFormula::Kind kind, std::string x, MsoFormula body)
{
    MsoFormula out{kind, std::move(x), {}, 0, {}};
    out.children.push_back(std::move(body));
    return out;
}

} // namespace

MsoFormula MsoFormula::exists(std::string x, MsoFormula body)
{
    return quantifier(Kind::ExistsFO, std::move(x), std::move(body));
}

MsoFormula MsoFormula::forall(std::string x, MsoFormula body)
{
    return quantifier(Kind::ForallFO, std::move(x), std::move(body));
}

MsoFormula MsoFormula::exists_set(std::string x, MsoFormula body)
{
    return quantifier(Kind::ExistsSO, std::move(x), std::move(body));
}

MsoFormula MsoFormula::forall_set(std::string x, MsoFormula body)
{
    return quantifier(Kind::ForallSO, std::move(x), std::move(body));
}

std::string to_string(const MsoFormula& f)
{
    using K = MsoFormula::Kind;
    auto list = [](const std::vector<std::string>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            s += (i ? ", " : "") + xs[i];
        }
        return s;
    };
    auto joined = [&](const char* op) {
        std::string s = "(";
        for (std::size_t i = 0; i < f.children.size(); ++i) {
            s += (i ? std::string(" ") + op + " " : "") + to_string(f.children[i]);
        }
        return s + ")";
    };
    switch (f.kind) {
    case K::True:
        return "true";
    case K::False:
        return "false";
    case K::Eq:
        return f.args[0] + " = " + f.args[1];
    case K::Edg:
        return "edg_" + f.name + "(" + list(f.args) + ")";
    case K::Member:
        return f.name + "(" + f.args[0] + ")";
    case K::IsVertex:
        return "vert(" + f.args[0] + ")";
    case K::Incid:
        return "incid[" + f.name + "," + std::to_string(f.position) + "](" + list(f.args) + ")";
    case K::Not:
        return "!" + to_string(f.children.front());
    case K::And:
        return joined("&");
    case K::Or:
        return joined("|");
    case K::ExistsFO:
        return "(exists " + f.name + " . " + to_string(f.children.front()) + ")";
    case K::ForallFO:
        return "(forall " + f.name + " . " + to_string(f.children.front()) + ")";
    case K::ExistsSO:
        return "(existsS " + f.name + " . " + to_string(f.children.front()) + ")";
    case K::ForallSO:
        return "(forallS " + f.name + " . " + to_string(f.children.front()) + ")";
    }
    return {};
}

namespace {

void collect_mso_free(const MsoFormula& f, std::set<std::string>& bound_fo, std::set<std::string>& bound_so,
                      MsoFreeVars& out)
{
    using K = MsoFormula::Kind;
    switch (f.kind) {
    case K::Member:
        if (!bound_so.count(f.name)) {
            out.second_order.insert(f.name);
        }
        break;
    case K::ExistsFO:
    case K::ForallFO: {
        const bool fresh = bound_fo.insert(f.name).second;
        collect_mso_free(f.children.front(), bound_fo, bound_so, out);
        if (fresh) {
            bound_fo.erase(f.name);
        }
        return;
    }
    case K::ExistsSO:
    case K::ForallSO: {
        const bool fresh = bound_so.insert(f.name).second;
        collect_mso_free(f.children.front(), bound_fo, bound_so, out);
        if (fresh) {
            bound_so.erase(f.name);
        }
        return;
    }
    default:
        break;
    }
    for (const auto& a : f.args) {
        if (!bound_fo.count(a)) {
            out.first_order.insert(a);
        }
    }
    for (const auto& c : f.children) {
        collect_mso_free(c, bound_fo, bound_so, out);
    }
}

} // namespace

MsoFreeVars mso_free_vars(const MsoFormula& f)
{
    MsoFreeVars out;
    std::set<std::string> fo;
    std::set<std::string> so;
    collect_mso_free(f, fo, so, out);
    return out;
}

// ---------------------------------------------------------------------------------------------
// Parser

namespace {

struct MToken {
    enum class Kind { Ident, Number, Punct, End };
    Kind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector<MToken> mso_tokenize(std::string_view text)
{
    std::vector<MToken> out;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') {
                advance(1);
            }
            continue;
        }
        const std::size_t l = line;
        const std::size_t co = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' || text[j] == '\'')) {
                ++j;
            }
            out.push_back({MToken::Kind::Ident, std::string(text.substr(i, j - i)), l, co});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
                ++j;
            }
            out.push_back({MToken::Kind::Number, std::string(text.substr(i, j - i)), l, co});
            advance(j - i);
            continue;
        }
        bool matched = false;
        for (std::string_view p : {"<->", "->", ":=", "!=", "(", ")", ",", ";", ".", "!", "&", "|", "=", "[", "]"}) {
            if (text.substr(i, p.size()) == p) {
                out.push_back({MToken::Kind::Punct, std::string(p), l, co});
                advance(p.size());
                matched = true;
                break;
            }
        }
        if (!matched) {
            throw Error(ErrorKind::SyntaxError, "line " + std::to_string(l) + ", column " + std::to_string(co) +
                                                    ": unexpected character '" + std::string(1, c) + "'");
        }
    }
    out.push_back({MToken::Kind::End, "", line, col});
    return out;
}

std::string where(const MToken& t)
{
    return "line " + std::to_string(t.line) + ", column " + std::to_string(t.column);
}

struct Macro {
    std::vector<std::string> params;
    std::vector<MToken> body;
};

struct Binding {
    std::string internal;
    bool set = false;
};

using Scope = std::map<std::string, Binding>;

class MsoParser {
public:
    MsoParser(const std::optional<Alphabet>& alphabet) : alphabet_(alphabet) {}

    MsoFormula parse_file(std::string_view text)
    {
        tokens_ = mso_tokenize(text);
        pos_ = 0;
        Scope scope;
        while (true) {
            if (peek_ident("let")) {
                next();
                const MToken name_tok = peek();
                std::string name = ident();
                Macro m;
                expect("(");
                if (!accept(")")) {
                    do {
                        m.params.push_back(ident());
                    } while (accept(","));
                    expect(")");
                }
                expect(":=");
                std::size_t depth = 0;
                while (!(depth == 0 && peek_punct(";"))) {
                    if (peek().kind == MToken::Kind::End) {
                        throw Error(ErrorKind::SyntaxError, where(peek()) + ": unterminated macro " + name);
                    }
                    if (peek_punct("(")) {
                        ++depth;
                    } else if (peek_punct(")") && depth > 0) {
                        --depth;
                    }
                    m.body.push_back(next());
                }
                expect(";");
                m.body.push_back({MToken::Kind::End, "", name_tok.line, name_tok.column});
                if (!macros_.emplace(name, std::move(m)).second) {
                    throw Error(ErrorKind::SyntaxError, where(name_tok) + ": macro " + name + " defined twice");
                }
            } else if (peek_ident("var") || peek_ident("setvar")) {
                const bool set = next().text == "setvar";
                do {
                    std::string v = ident();
                    used_.insert(v);
                    scope[v] = Binding{v, set};
                } while (peek().kind == MToken::Kind::Ident);
                expect(";");
            } else {
                break;
            }
        }
        MsoFormula f = formula(scope);
        accept(";");
        if (peek().kind != MToken::Kind::End) {
            throw Error(ErrorKind::SyntaxError, where(peek()) + ": trailing input");
        }
        return f;
    }

private:
    const MToken& peek() const { return tokens_[pos_]; }
    const MToken& next() { return tokens_[pos_++]; }
    bool peek_ident(std::string_view s) const { return peek().kind == MToken::Kind::Ident && peek().text == s; }
    bool peek_punct(std::string_view s) const { return peek().kind == MToken::Kind::Punct && peek().text == s; }
    bool accept(std::string_view s)
    {
        if (peek_punct(s)) {
            next();
            return true;
        }
        return false;
    }
    void expect(std::string_view s)
    {
        if (!accept(s)) {
            throw Error(ErrorKind::SyntaxError, where(peek()) + ": expected '" + std::string(s) + "'");
        }
    }
    std::string ident()
    {
        if (peek().kind != MToken::Kind::Ident) {
            throw Error(ErrorKind::SyntaxError, where(peek()) + ": expected identifier");
        }
        return next().text;
    }

    std::string fresh(const std::string& base)
    {
        std::string name = base;
        for (std::size_t i = 1; used_.count(name); ++i) {
            name = base + "_" + std::to_string(i);
        }
        used_.insert(name);
        return name;
    }

    MsoFormula formula(const Scope& scope)
    {
        MsoFormula lhs = implication(scope);
        while (accept("<->")) {
            lhs = MsoFormula::iff(std::move(lhs), implication(scope));
        }
        return lhs;
    }

    MsoFormula implication(const Scope& scope)
    {
        MsoFormula lhs = disjunction(scope);
        if (accept("->")) {
            return MsoFormula::implies(std::move(lhs), implication(scope));
        }
        return lhs;
    }

    MsoFormula disjunction(const Scope& scope)
    {
        std::vector<MsoFormula> parts;
        parts.push_back(conjunction(scope));
        while (accept("|")) {
            parts.push_back(conjunction(scope));
        }
        return MsoFormula::disj(std::move(parts));
    }

    MsoFormula conjunction(const Scope& scope)
    {
        std::vector<MsoFormula> parts;
        parts.push_back(unary(scope));
        while (accept("&")) {
            parts.push_back(unary(scope));
        }
        return MsoFormula::conj(std::move(parts));
    }

    MsoFormula unary(const Scope& scope)
    {
        if (accept("!")) {
            return MsoFormula::negate(unary(scope));
        }
        if (accept("(")) {
            MsoFormula f = formula(scope);
            expect(")");
            return f;
        }
        for (std::string_view q : {"exists", "forall", "existsS", "forallS"}) {
            if (peek_ident(q)) {
                next();
                const bool set = q.back() == 'S';
                std::vector<std::string> names;
                do {
                    names.push_back(ident());
                } while (peek().kind == MToken::Kind::Ident);
                expect(".");
                Scope inner = scope;
                std::vector<std::string> internal;
                for (const auto& n : names) {
                    internal.push_back(fresh(n));
                    inner[n] = Binding{internal.back(), set};
                }
                MsoFormula body = formula(inner);
                for (std::size_t i = internal.size(); i-- > 0;) {
                    if (q == "exists") {
                        body = MsoFormula::exists(internal[i], std::move(body));
                    } else if (q == "forall") {
                        body = MsoFormula::forall(internal[i], std::move(body));
                    } else if (q == "existsS") {
                        body = MsoFormula::exists_set(internal[i], std::move(body));
                    } else {
                        body = MsoFormula::forall_set(internal[i], std::move(body));
                    }
                }
                return body;
            }
        }
        return atom(scope);
    }

    std::string variable(const Scope& scope, const std::string& name, const MToken& at, bool set)
    {
        auto it = scope.find(name);
        if (it == scope.end()) {
            throw Error(ErrorKind::UndeclaredSymbol, where(at) + ": unbound variable " + name);
        }
        if (it->second.set != set) {
            throw Error(ErrorKind::SyntaxError, where(at) + ": " + name + (set ? " is not a set variable"
                                                                              : " is a set variable"));
        }
        return it->second.internal;
    }

    void check_label(const std::string& label, std::size_t arity, const MToken& at)
    {
        if (alphabet_) {
            auto l = find_label(*alphabet_, label);
            if (!l && label == kDisequalityName) {
                l = disequality_label();
            }
            if (!l) {
                throw Error(ErrorKind::UndeclaredSymbol, where(at) + ": unknown label " + label);
            }
            if (static_cast<std::size_t>(l->arity) != arity) {
                throw Error(ErrorKind::ArityError, where(at) + ": label " + label + " has arity " +
                                                       std::to_string(l->arity));
            }
        }
        auto [it, fresh_label] = arities_.emplace(label, arity);
        if (!fresh_label && it->second != arity) {
            throw Error(ErrorKind::ArityError, where(at) + ": label " + label + " used with two arities");
        }
    }

    MsoFormula atom(const Scope& scope)
    {
        const MToken at = peek();
        std::string name = ident();
        if (name == "true") {
            return MsoFormula::truth();
        }
        if (name == "false") {
            return MsoFormula::falsity();
        }
        if (name == "incid" && accept("[")) {
            std::string label = ident();
            expect(",");
            if (peek().kind != MToken::Kind::Number) {
                throw Error(ErrorKind::SyntaxError, where(peek()) + ": expected position");
            }
            const std::size_t position = std::stoul(next().text);
            expect("]");
            expect("(");
            const MToken xt = peek();
            std::string x = variable(scope, ident(), xt, false);
            expect(",");
            const MToken yt = peek();
            std::string y = variable(scope, ident(), yt, false);
            expect(")");
            if (position == 0) {
                throw Error(ErrorKind::ArityError, where(at) + ": positions start at 1");
            }
            if (alphabet_) {
                auto l = find_label(*alphabet_, label);
                if (!l && label == kDisequalityName) {
                    l = disequality_label();
                }
                if (!l) {
                    throw Error(ErrorKind::UndeclaredSymbol, where(at) + ": unknown label " + label);
                }
                if (position > static_cast<std::size_t>(l->arity)) {
                    throw Error(ErrorKind::ArityError, where(at) + ": position beyond the arity of " + label);
                }
            }
            return MsoFormula::incid(label, position, x, y);
        }
        if (!peek_punct("(")) {
            std::string lhs = variable(scope, name, at, false);
            if (accept("=")) {
                const MToken rt = peek();
                return MsoFormula::eq(lhs, variable(scope, ident(), rt, false));
            }
            if (accept("!=")) {
                const MToken rt = peek();
                return MsoFormula::negate(MsoFormula::eq(lhs, variable(scope, ident(), rt, false)));
            }
            throw Error(ErrorKind::SyntaxError, where(peek()) + ": expected '=' or '!='");
        }
        expect("(");
        std::vector<std::pair<std::string, MToken>> raw_args;
        if (!accept(")")) {
            do {
                const MToken t = peek();
                raw_args.emplace_back(ident(), t);
            } while (accept(","));
            expect(")");
        }
        if (auto it = macros_.find(name); it != macros_.end()) {
            return expand(it->second, raw_args, scope, at);
        }
        if (name == "single") {
            if (raw_args.size() != 1) {
                throw Error(ErrorKind::ArityError, where(at) + ": single takes one set variable");
            }
            std::string set = variable(scope, raw_args[0].first, raw_args[0].second, true);
            std::string x = fresh("x");
            std::string y = fresh("y");
            return MsoFormula::exists(
                x, MsoFormula::conj({MsoFormula::member(set, x),
                                     MsoFormula::forall(y, MsoFormula::implies(MsoFormula::member(set, y),
                                                                               MsoFormula::eq(y, x)))}));
        }
        if (name == "vert") {
            if (raw_args.size() != 1) {
                throw Error(ErrorKind::ArityError, where(at) + ": vert takes one variable");
            }
            return MsoFormula::is_vertex(variable(scope, raw_args[0].first, raw_args[0].second, false));
        }
        if (auto it = scope.find(name); it != scope.end() && it->second.set) {
            if (raw_args.size() != 1) {
                throw Error(ErrorKind::ArityError, where(at) + ": membership takes one variable");
            }
            return MsoFormula::member(it->second.internal,
                                      variable(scope, raw_args[0].first, raw_args[0].second, false));
        }
        std::vector<std::string> args;
        for (const auto& [a, t] : raw_args) {
            args.push_back(variable(scope, a, t, false));
        }
        if (name.rfind("edg_", 0) == 0 && name.size() > 4) {
            std::string label = name.substr(4);
            if (args.size() < 2) {
                throw Error(ErrorKind::ArityError, where(at) + ": " + name + " needs an edge and its attachments");
            }
            check_label(label, args.size() - 1, at);
            return MsoFormula::edg(label, std::move(args));
        }
        if (!alphabet_ && !std::islower(static_cast<unsigned char>(name.front()))) {
            throw Error(ErrorKind::UndeclaredSymbol, where(at) + ": unknown symbol " + name);
        }
        if (args.empty()) {
            throw Error(ErrorKind::ArityError, where(at) + ": label atoms need arguments");
        }
        check_label(name, args.size(), at);
        std::string e = fresh("e");
        args.insert(args.begin(), e);
        return MsoFormula::exists(e, MsoFormula::edg(name, std::move(args)));
    }

    MsoFormula expand(const Macro& m, const std::vector<std::pair<std::string, MToken>>& args, const Scope& scope,
                      const MToken& at)
    {
        if (args.size() != m.params.size()) {
            throw Error(ErrorKind::ArityError, where(at) + ": macro expects " + std::to_string(m.params.size()) +
                                                   " arguments");
        }
        if (++expansion_depth_ > 64) {
            throw Error(ErrorKind::SyntaxError, where(at) + ": macro expansion too deep");
        }
        Scope inner;
        for (const auto& [n, b] : scope) {
            if (b.internal == n && declared_free(n)) {
                inner[n] = b;
            }
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
            auto it = scope.find(args[i].first);
            if (it == scope.end()) {
                throw Error(ErrorKind::UndeclaredSymbol, where(args[i].second) + ": unbound variable " +
                                                             args[i].first);
            }
            inner[m.params[i]] = it->second;
        }
        auto saved_tokens = std::move(tokens_);
        const std::size_t saved_pos = pos_;
        tokens_ = m.body;
        pos_ = 0;
        MsoFormula f = formula(inner);
        if (peek().kind != MToken::Kind::End) {
            throw Error(ErrorKind::SyntaxError, where(peek()) + ": trailing input in macro");
        }
        tokens_ = std::move(saved_tokens);
        pos_ = saved_pos;
        --expansion_depth_;
        return f;
    }

    bool declared_free(const std::string&) const { return false; }

    const std::optional<Alphabet>& alphabet_;
    std::vector<MToken> tokens_;
    std::size_t pos_ = 0;
    std::map<std::string, Macro> macros_;
    std::set<std::string> used_;
    std::map<std::string, std::size_t> arities_;
    std::size_t expansion_depth_ = 0;
};

} // namespace

MsoFormula parse_mso(std::string_view text, const std::optional<Alphabet>& alphabet)
{
    return MsoParser(alphabet).parse_file(text);
}

MsoFormula read_mso_file(const std::string& path, const std::optional<Alphabet>& alphabet)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_mso(buffer.str(), alphabet);
}

// ---------------------------------------------------------------------------------------------
// Evaluation

namespace {

using Bits = std::uint64_t;
constexpr long kFree = -1;

enum class Op { True, False, Eq, Edg, Member, IsVertex, Incid, And, Or, ExistsFO, ForallFO, ExistsSO, ForallSO };

struct Node {
    Op op = Op::True;
    bool negated = false;
    std::string label;
    std::size_t position = 0;
    std::vector<std::size_t> fo;
    std::size_t so = 0;
    std::size_t bound = 0;
    std::vector<std::size_t> kids;
    bool memo = false;
    bool vertex_sets = false;
    std::vector<std::size_t> free_fo;
    std::vector<std::size_t> free_so;
};

// Negation normal form over numbered variable slots.
class MsoProgram {
public:
    std::vector<Node> nodes;
    std::size_t root = 0;
    std::map<std::string, std::size_t> fo_slot;
    std::map<std::string, std::size_t> so_slot;
    std::size_t num_fo = 0;
    std::size_t num_so = 0;

    MsoProgram(const MsoFormula& f, const std::vector<std::string>& free_fo, const std::vector<std::string>& free_so)
    {
        std::map<std::string, std::size_t> fo_env;
        std::map<std::string, std::size_t> so_env;
        for (const auto& v : free_fo) {
            fo_env[v] = num_fo;
            fo_slot[v] = num_fo++;
        }
        for (const auto& v : free_so) {
            so_env[v] = num_so;
            so_slot[v] = num_so++;
        }
        root = build(f, false, fo_env, so_env);
        vertex_sort_.assign(num_fo, false);
        for (auto& n : nodes) {
            if (n.op == Op::ExistsFO || n.op == Op::ForallFO) {
                vertex_sort_[n.bound] = statically_vertex(n);
            }
        }
        std::vector<bool> only_vertices(num_so, true);
        for (const auto& n : nodes) {
            if (n.op == Op::Member && !vertex_sort_[n.fo[0]]) {
                only_vertices[n.so] = false;
            }
        }
        for (std::size_t s = 0; s < free_so.size(); ++s) {
            only_vertices[s] = false;
        }
        for (auto& n : nodes) {
            if (n.op == Op::ExistsSO || n.op == Op::ForallSO) {
                n.vertex_sets = only_vertices[n.bound];
            }
        }
        std::vector<bool> has_so(nodes.size(), false);
        annotate(root, has_so);
    }

private:
    std::vector<bool> vertex_sort_;

    std::size_t add(Node n)
    {
        nodes.push_back(std::move(n));
        return nodes.size() - 1;
    }

    static std::size_t lookup(const std::map<std::string, std::size_t>& env, const std::string& v)
    {
        auto it = env.find(v);
        if (it == env.end()) {
            throw Error(ErrorKind::UndeclaredSymbol, "unbound variable " + v);
        }
        return it->second;
    }

    std::size_t build(const MsoFormula& f, bool neg, const std::map<std::string, std::size_t>& fo_env,
                      const std::map<std::string, std::size_t>& so_env)
    {
        using K = MsoFormula::Kind;
        Node n;
        switch (f.kind) {
        case K::True:
        case K::False:
            n.op = (f.kind == K::True) != neg ? Op::True : Op::False;
            return add(n);
        case K::Eq:
        case K::Edg:
        case K::IsVertex:
        case K::Incid:
            n.op = f.kind == K::Eq ? Op::Eq : f.kind == K::Edg ? Op::Edg : f.kind == K::IsVertex ? Op::IsVertex : Op::Incid;
            n.negated = neg;
            n.label = f.name;
            n.position = f.position;
            for (const auto& a : f.args) {
                n.fo.push_back(lookup(fo_env, a));
            }
            return add(n);
        case K::Member:
            n.op = Op::Member;
            n.negated = neg;
            n.so = lookup(so_env, f.name);
            n.fo.push_back(lookup(fo_env, f.args[0]));
            return add(n);
        case K::Not:
            return build(f.children.front(), !neg, fo_env, so_env);
        case K::And:
        case K::Or: {
            n.op = (f.kind == K::And) != neg ? Op::And : Op::Or;
            std::vector<std::size_t> kids;
            for (const auto& c : f.children) {
                kids.push_back(build(c, neg, fo_env, so_env));
            }
            n.kids = std::move(kids);
            return add(n);
        }
        case K::ExistsFO:
        case K::ForallFO: {
            n.op = (f.kind == K::ExistsFO) != neg ? Op::ExistsFO : Op::ForallFO;
            auto inner = fo_env;
            n.bound = num_fo++;
            inner[f.name] = n.bound;
            n.kids.push_back(build(f.children.front(), neg, inner, so_env));
            return add(n);
        }
        case K::ExistsSO:
        case K::ForallSO: {
            n.op = (f.kind == K::ExistsSO) != neg ? Op::ExistsSO : Op::ForallSO;
            auto inner = so_env;
            n.bound = num_so++;
            inner[f.name] = n.bound;
            n.kids.push_back(build(f.children.front(), neg, fo_env, inner));
            return add(n);
        }
        }
        return add(n);
    }

    // Guards restrict an existential through a conjunct and a universal through a negated disjunct.
    std::vector<std::size_t> guards(const Node& q) const
    {
        const Node& body = nodes[q.kids.front()];
        const bool want_negated = q.op == Op::ForallFO || q.op == Op::ForallSO;
        const Op junction = want_negated ? Op::Or : Op::And;
        std::vector<std::size_t> candidates;
        if (body.op == junction) {
            candidates = body.kids;
        } else {
            candidates.push_back(q.kids.front());
        }
        std::vector<std::size_t> out;
        for (std::size_t c : candidates) {
            const Node& g = nodes[c];
            const bool atom = g.op == Op::Eq || g.op == Op::Edg || g.op == Op::Member || g.op == Op::IsVertex ||
                              g.op == Op::Incid;
            if (atom && g.negated == want_negated) {
                out.push_back(c);
            }
            // exists e . edg_a(e, ..) under an existential; forall e . !edg_a(e, ..) under a universal.
            const Op inner_q = want_negated ? Op::ForallFO : Op::ExistsFO;
            if (g.op == inner_q) {
                const Node& ib = nodes[g.kids.front()];
                if (ib.op == Op::Edg && ib.negated == want_negated && ib.fo[0] == g.bound) {
                    out.push_back(c);
                }
            }
        }
        return out;
    }

    bool statically_vertex(const Node& q) const
    {
        for (std::size_t c : guards(q)) {
            const Node& g = nodes[c];
            if (g.op == Op::IsVertex && g.fo[0] == q.bound) {
                return true;
            }
            const Node& a = (g.op == Op::ExistsFO || g.op == Op::ForallFO) ? nodes[g.kids.front()] : g;
            if (a.op == Op::Edg) {
                for (std::size_t p = 1; p < a.fo.size(); ++p) {
                    if (a.fo[p] == q.bound) {
                        return true;
                    }
                }
            }
            if (a.op == Op::Incid && a.fo[1] == q.bound) {
                return true;
            }
        }
        return false;
    }

    void annotate(std::size_t id, std::vector<bool>& has_so)
    {
        Node& n = nodes[id];
        std::set<std::size_t> fo;
        std::set<std::size_t> so;
        bool contains_so = n.op == Op::ExistsSO || n.op == Op::ForallSO;
        if (n.op == Op::Member) {
            so.insert(n.so);
        }
        fo.insert(n.fo.begin(), n.fo.end());
        for (std::size_t k : nodes[id].kids) {
            annotate(k, has_so);
            const Node& kid = nodes[k];
            fo.insert(kid.free_fo.begin(), kid.free_fo.end());
            so.insert(kid.free_so.begin(), kid.free_so.end());
            contains_so = contains_so || has_so[k];
        }
        Node& m = nodes[id];
        if (m.op == Op::ExistsFO || m.op == Op::ForallFO) {
            fo.erase(m.bound);
        }
        if (m.op == Op::ExistsSO || m.op == Op::ForallSO) {
            so.erase(m.bound);
        }
        m.free_fo.assign(fo.begin(), fo.end());
        m.free_so.assign(so.begin(), so.end());
        has_so[id] = contains_so;
        const bool quantifier = m.op == Op::ExistsFO || m.op == Op::ForallFO || m.op == Op::ExistsSO ||
                                m.op == Op::ForallSO;
        m.memo = quantifier && contains_so;
    }

public:
    std::vector<std::size_t> guard_nodes(const Node& q) const { return guards(q); }
};

struct VecHash {
    std::size_t operator()(const std::vector<Bits>& v) const noexcept
    {
        std::size_t h = 1469598103934665603ULL;
        for (Bits b : v) {
            h = (h ^ b) * 1099511628211ULL;
        }
        return h;
    }
};

class MsoEvaluator {
public:
    MsoEvaluator(const CGraph& g, const MsoProgram& p, std::size_t set_limit)
        : g_(g), p_(p), n_(g.num_vertices()), total_(g.num_vertices() + g.num_edges()), set_limit_(set_limit)
    {
        if (total_ > 64) {
            throw Error(ErrorKind::TooLarge, "MSO evaluation limited to 64 vertices and edges");
        }
        fo_.assign(p.num_fo, kFree);
        so_.assign(p.num_so, 0);
        memo_.resize(p.nodes.size());
        guards_.resize(p.nodes.size());
        for (std::size_t i = 0; i < p.nodes.size(); ++i) {
            if (p.nodes[i].op == Op::ExistsFO || p.nodes[i].op == Op::ForallFO) {
                guards_[i] = p.guard_nodes(p.nodes[i]);
            }
        }
    }

    std::vector<long> fo_;
    std::vector<Bits> so_;

    bool eval(std::size_t id)
    {
        const Node& n = p_.nodes[id];
        switch (n.op) {
        case Op::True:
            return true;
        case Op::False:
            return false;
        case Op::Eq:
        case Op::Edg:
        case Op::Member:
        case Op::IsVertex:
        case Op::Incid:
            return atom(n) != n.negated;
        case Op::And:
            for (std::size_t k : n.kids) {
                if (!eval(k)) {
                    return false;
                }
            }
            return true;
        case Op::Or:
            for (std::size_t k : n.kids) {
                if (eval(k)) {
                    return true;
                }
            }
            return false;
        default:
            break;
        }
        if (!n.memo) {
            return quantify(id);
        }
        std::vector<Bits> key;
        key.reserve(n.free_fo.size() + n.free_so.size());
        for (std::size_t s : n.free_fo) {
            key.push_back(static_cast<Bits>(fo_[s]));
        }
        for (std::size_t s : n.free_so) {
            key.push_back(so_[s]);
        }
        auto& table = memo_[id];
        if (auto it = table.find(key); it != table.end()) {
            return it->second;
        }
        const bool value = quantify(id);
        table.emplace(std::move(key), value);
        return value;
    }

private:
    bool is_edge(long x) const { return x >= static_cast<long>(n_); }
    const Edge& edge_of(long x) const { return g_.edge(static_cast<std::size_t>(x) - n_); }

    bool atom(const Node& n) const
    {
        switch (n.op) {
        case Op::Eq:
            return fo_[n.fo[0]] == fo_[n.fo[1]];
        case Op::Member:
            return (so_[n.so] >> fo_[n.fo[0]]) & 1U;
        case Op::IsVertex:
            return !is_edge(fo_[n.fo[0]]);
        case Op::Edg: {
            const long x = fo_[n.fo[0]];
            if (!is_edge(x)) {
                return false;
            }
            const Edge& e = edge_of(x);
            if (e.label.name != n.label || e.attach.size() + 1 != n.fo.size()) {
                return false;
            }
            for (std::size_t p = 0; p < e.attach.size(); ++p) {
                if (fo_[n.fo[p + 1]] != static_cast<long>(e.attach[p])) {
                    return false;
                }
            }
            return true;
        }
        case Op::Incid: {
            const long x = fo_[n.fo[0]];
            if (!is_edge(x)) {
                return false;
            }
            const Edge& e = edge_of(x);
            return e.label.name == n.label && n.position >= 1 && n.position <= e.attach.size() &&
                   fo_[n.fo[1]] == static_cast<long>(e.attach[n.position - 1]);
        }
        default:
            return false;
        }
    }

    // Candidate values of the bound variable; absent means the whole domain.
    std::optional<std::vector<long>> narrow(std::size_t id) const
    {
        const Node& q = p_.nodes[id];
        const std::size_t x = q.bound;
        std::optional<std::vector<long>> best;
        auto offer = [&](std::vector<long> c) {
            if (!best || c.size() < best->size()) {
                best = std::move(c);
            }
        };
        auto vertices_at = [&](const std::string& label, std::size_t arity, std::size_t p) {
            std::set<long> s;
            for (const auto& e : g_.edges()) {
                if (e.label.name == label && e.attach.size() == arity) {
                    s.insert(static_cast<long>(e.attach[p]));
                }
            }
            return std::vector<long>(s.begin(), s.end());
        };
        for (std::size_t gid : guards_[id]) {
            const Node& gd = p_.nodes[gid];
            if (gd.op == Op::ExistsFO || gd.op == Op::ForallFO) {
                const Node& a = p_.nodes[gd.kids.front()];
                for (std::size_t p = 1; p < a.fo.size(); ++p) {
                    if (a.fo[p] == x) {
                        offer(vertices_at(a.label, a.fo.size() - 1, p - 1));
                        break;
                    }
                }
                continue;
            }
            switch (gd.op) {
            case Op::IsVertex:
                if (gd.fo[0] == x) {
                    std::vector<long> c(n_);
                    for (std::size_t v = 0; v < n_; ++v) {
                        c[v] = static_cast<long>(v);
                    }
                    offer(std::move(c));
                }
                break;
            case Op::Member:
                if (gd.fo[0] == x) {
                    std::vector<long> c;
                    for (std::size_t i = 0; i < total_; ++i) {
                        if ((so_[gd.so] >> i) & 1U) {
                            c.push_back(static_cast<long>(i));
                        }
                    }
                    offer(std::move(c));
                }
                break;
            case Op::Eq:
                if (gd.fo[0] == x && gd.fo[1] != x && fo_[gd.fo[1]] != kFree) {
                    offer({fo_[gd.fo[1]]});
                } else if (gd.fo[1] == x && gd.fo[0] != x && fo_[gd.fo[0]] != kFree) {
                    offer({fo_[gd.fo[0]]});
                }
                break;
            case Op::Edg: {
                if (gd.fo[0] == x) {
                    std::vector<long> c;
                    for (std::size_t e = 0; e < g_.num_edges(); ++e) {
                        if (g_.edge(e).label.name == gd.label && g_.edge(e).attach.size() + 1 == gd.fo.size()) {
                            c.push_back(static_cast<long>(n_ + e));
                        }
                    }
                    offer(std::move(c));
                    break;
                }
                for (std::size_t p = 1; p < gd.fo.size(); ++p) {
                    if (gd.fo[p] != x) {
                        continue;
                    }
                    const long owner = fo_[gd.fo[0]];
                    if (owner != kFree) {
                        if (is_edge(owner) && edge_of(owner).attach.size() + 1 == gd.fo.size()) {
                            offer({static_cast<long>(edge_of(owner).attach[p - 1])});
                        } else {
                            offer({});
                        }
                    } else {
                        offer(vertices_at(gd.label, gd.fo.size() - 1, p - 1));
                    }
                    break;
                }
                break;
            }
            case Op::Incid:
                if (gd.fo[0] == x) {
                    std::vector<long> c;
                    for (std::size_t e = 0; e < g_.num_edges(); ++e) {
                        if (g_.edge(e).label.name == gd.label) {
                            c.push_back(static_cast<long>(n_ + e));
                        }
                    }
                    offer(std::move(c));
                } else if (gd.fo[1] == x && fo_[gd.fo[0]] != kFree) {
                    const long owner = fo_[gd.fo[0]];
                    if (is_edge(owner) && edge_of(owner).label.name == gd.label &&
                        gd.position <= edge_of(owner).attach.size()) {
                        offer({static_cast<long>(edge_of(owner).attach[gd.position - 1])});
                    } else {
                        offer({});
                    }
                }
                break;
            default:
                break;
            }
        }
        return best;
    }

    bool quantify(std::size_t id)
    {
        const Node& n = p_.nodes[id];
        const bool existential = n.op == Op::ExistsFO || n.op == Op::ExistsSO;
        if (n.op == Op::ExistsFO || n.op == Op::ForallFO) {
            const long saved = fo_[n.bound];
            bool result = !existential;
            auto visit = [&](long v) {
                fo_[n.bound] = v;
                if (eval(n.kids.front()) == existential) {
                    result = existential;
                    return false;
                }
                return true;
            };
            if (auto c = narrow(id)) {
                for (long v : *c) {
                    if (!visit(v)) {
                        break;
                    }
                }
            } else {
                for (std::size_t v = 0; v < total_; ++v) {
                    if (!visit(static_cast<long>(v))) {
                        break;
                    }
                }
            }
            fo_[n.bound] = saved;
            return result;
        }
        const std::size_t width = n.vertex_sets ? n_ : total_;
        if (width > set_limit_) {
            throw Error(ErrorKind::TooLarge, "set quantifier over " + std::to_string(width) +
                                                 " elements exceeds the limit " + std::to_string(set_limit_));
        }
        const Bits saved = so_[n.bound];
        bool result = !existential;
        const Bits count = Bits{1} << width;
        for (Bits s = 0; s < count; ++s) {
            so_[n.bound] = s;
            if (eval(n.kids.front()) == existential) {
                result = existential;
                break;
            }
        }
        so_[n.bound] = saved;
        return result;
    }

    const CGraph& g_;
    const MsoProgram& p_;
    std::size_t n_;
    std::size_t total_;
    std::size_t set_limit_;
    std::vector<std::unordered_map<std::vector<Bits>, bool, VecHash>> memo_;
    std::vector<std::vector<std::size_t>> guards_;
};

long element_index(const CGraph& g, const Element& e)
{
    if (e.edge ? e.index >= g.num_edges() : e.index >= g.num_vertices()) {
        throw Error(ErrorKind::InvalidGraph, "store element outside the graph");
    }
    return static_cast<long>(e.edge ? g.num_vertices() + e.index : e.index);
}

} // namespace

bool mso_eval(const CGraph& g, const MsoStore& s, const MsoFormula& phi, std::size_t set_limit)
{
    const auto free = mso_free_vars(phi);
    std::vector<std::string> fo(free.first_order.begin(), free.first_order.end());
    std::vector<std::string> so(free.second_order.begin(), free.second_order.end());
    MsoProgram program(phi, fo, so);
    MsoEvaluator ev(g, program, set_limit);
    for (const auto& v : fo) {
        auto it = s.first_order.find(v);
        if (it == s.first_order.end()) {
            throw Error(ErrorKind::UndeclaredSymbol, "store does not define " + v);
        }
        ev.fo_[program.fo_slot.at(v)] = element_index(g, it->second);
    }
    for (const auto& v : so) {
        auto it = s.second_order.find(v);
        if (it == s.second_order.end()) {
            throw Error(ErrorKind::UndeclaredSymbol, "store does not define " + v);
        }
        Bits bits = 0;
        for (const auto& e : it->second) {
            bits |= Bits{1} << element_index(g, e);
        }
        ev.so_[program.so_slot.at(v)] = bits;
    }
    return ev.eval(program.root);
}

// ---------------------------------------------------------------------------------------------
// Transductions

namespace {

// Top-level conjuncts, distributing universal quantifiers over conjunctions.
void split_conjuncts(const MsoFormula& f, std::vector<MsoFormula>& out)
{
    using K = MsoFormula::Kind;
    if (f.kind == K::And) {
        for (const auto& c : f.children) {
            split_conjuncts(c, out);
        }
        return;
    }
    if (f.kind == K::ForallFO && f.children.front().kind == K::And) {
        for (const auto& c : f.children.front().children) {
            split_conjuncts(MsoFormula::forall(f.name, c), out);
        }
        return;
    }
    if (f.kind == K::True) {
        return;
    }
    out.push_back(f);
}

// For forall x . (!X(x) | R): the residual R with x free.
std::optional<std::pair<std::string, MsoFormula>> membership_bound(const MsoFormula& f, const std::string& param)
{
    using K = MsoFormula::Kind;
    if (f.kind != K::ForallFO) {
        return std::nullopt;
    }
    const MsoFormula& body = f.children.front();
    if (body.kind != K::Or) {
        return std::nullopt;
    }
    std::vector<MsoFormula> rest;
    bool found = false;
    for (const auto& d : body.children) {
        if (!found && d.kind == K::Not && d.children.front().kind == K::Member &&
            d.children.front().name == param && d.children.front().args[0] == f.name) {
            found = true;
        } else {
            rest.push_back(d);
        }
    }
    if (!found) {
        return std::nullopt;
    }
    return std::make_pair(f.name, MsoFormula::disj(std::move(rest)));
}

struct Valuation {
    std::map<std::string, std::set<Element>> sets;
};

class TransductionRunner {
public:
    TransductionRunner(const TransductionScheme& theta, const CGraph& g, std::size_t set_limit)
        : theta_(theta), g_(g), set_limit_(set_limit)
    {
        split_conjuncts(theta.domain, conjuncts_);
        for (const auto& c : conjuncts_) {
            const auto fv = mso_free_vars(c);
            if (!fv.first_order.empty()) {
                throw Error(ErrorKind::NonFunctionalScheme, "domain formula has free first-order variables");
            }
            for (const auto& s : fv.second_order) {
                if (std::find(theta.parameters.begin(), theta.parameters.end(), s) == theta.parameters.end()) {
                    throw Error(ErrorKind::NonFunctionalScheme, "domain formula mentions unknown parameter " + s);
                }
            }
            conjunct_params_.push_back(fv.second_order);
        }
    }

    GraphSet run()
    {
        MsoStore store;
        assign(0, store);
        return std::move(out_);
    }

private:
    bool holds(const MsoFormula& f, const MsoStore& s) const { return mso_eval(g_, s, f, set_limit_); }

    std::vector<Element> all_elements() const
    {
        std::vector<Element> out;
        for (std::size_t v = 0; v < g_.num_vertices(); ++v) {
            out.push_back({false, v});
        }
        for (std::size_t e = 0; e < g_.num_edges(); ++e) {
            out.push_back({true, e});
        }
        return out;
    }

    void assign(std::size_t k, MsoStore& store)
    {
        if (k == theta_.parameters.size()) {
            emit(store);
            return;
        }
        const std::string& param = theta_.parameters[k];
        std::vector<Element> allowed = all_elements();
        for (const auto& c : conjuncts_) {
            auto bound = membership_bound(c, param);
            if (!bound) {
                continue;
            }
            const auto fv = mso_free_vars(bound->second);
            const bool ready = std::all_of(fv.second_order.begin(), fv.second_order.end(),
                                           [&](const std::string& s) { return store.second_order.count(s) != 0; });
            if (!ready) {
                continue;
            }
            std::vector<Element> kept;
            for (const auto& e : allowed) {
                MsoStore probe = store;
                probe.first_order[bound->first] = e;
                if (holds(bound->second, probe)) {
                    kept.push_back(e);
                }
            }
            allowed = std::move(kept);
        }
        if (allowed.size() > set_limit_) {
            throw Error(ErrorKind::TooLarge, "parameter " + param + " ranges over too many elements");
        }
        const std::uint64_t count = std::uint64_t{1} << allowed.size();
        for (std::uint64_t bits = 0; bits < count; ++bits) {
            std::set<Element> value;
            for (std::size_t i = 0; i < allowed.size(); ++i) {
                if ((bits >> i) & 1U) {
                    value.insert(allowed[i]);
                }
            }
            store.second_order[param] = std::move(value);
            bool ok = true;
            for (std::size_t c = 0; c < conjuncts_.size() && ok; ++c) {
                const auto& ps = conjunct_params_[c];
                const bool completes = ps.count(param) != 0 || (k == 0 && ps.empty());
                const bool ready = std::all_of(ps.begin(), ps.end(), [&](const std::string& s) {
                    return store.second_order.count(s) != 0;
                });
                if (completes && ready) {
                    ok = holds(conjuncts_[c], store);
                }
            }
            if (ok) {
                assign(k + 1, store);
            }
        }
        store.second_order.erase(param);
    }

    void emit(const MsoStore& params)
    {
        const std::size_t k = theta_.copies;
        auto layer_holds = [&](std::size_t i, Element x) {
            MsoStore s = params;
            s.first_order["x1"] = x;
            return holds(theta_.layers[i], s);
        };
        std::vector<std::vector<bool>> vertex_in(g_.num_vertices(), std::vector<bool>(k, false));
        CGraph out;
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> vertex_index;
        for (std::size_t v = 0; v < g_.num_vertices(); ++v) {
            for (std::size_t i = 0; i < k; ++i) {
                if (layer_holds(i, {false, v})) {
                    vertex_in[v][i] = true;
                    vertex_index[{v, i}] = out.add_vertex(g_.vertex_id(v) + "/" + std::to_string(i + 1));
                }
            }
        }
        for (std::size_t e = 0; e < g_.num_edges(); ++e) {
            for (std::size_t i = 0; i < k; ++i) {
                if (!layer_holds(i, {true, e})) {
                    continue;
                }
                std::optional<std::pair<Label, std::vector<std::size_t>>> found;
                for (const auto& [key, formula] : theta_.edges) {
                    const auto& [label_name, layers] = key;
                    if (layers.empty() || layers[0] != i + 1) {
                        continue;
                    }
                    const std::size_t arity = layers.size() - 1;
                    std::vector<std::size_t> tuple(arity, 0);
                    while (true) {
                        MsoStore s = params;
                        s.first_order["x1"] = {true, e};
                        for (std::size_t p = 0; p < arity; ++p) {
                            s.first_order["x" + std::to_string(p + 2)] = {false, tuple[p]};
                        }
                        if (g_.num_vertices() > 0 && holds(formula, s)) {
                            std::vector<std::size_t> attach;
                            for (std::size_t p = 0; p < arity; ++p) {
                                const std::size_t layer = layers[p + 1] - 1;
                                auto it = vertex_index.find({tuple[p], layer});
                                if (it == vertex_index.end()) {
                                    throw Error(ErrorKind::NonFunctionalScheme,
                                                "edge attached to a vertex outside the output");
                                }
                                attach.push_back(it->second);
                            }
                            if (found) {
                                throw Error(ErrorKind::NonFunctionalScheme,
                                            "two edge formulas hold for edge " + g_.edge(e).id);
                            }
                            found = std::make_pair(Label{label_name, static_cast<int>(arity)}, std::move(attach));
                        }
                        if (arity == 0 || !next_tuple(tuple)) {
                            break;
                        }
                    }
                }
                if (!found) {
                    throw Error(ErrorKind::NonFunctionalScheme, "no edge formula holds for edge " + g_.edge(e).id);
                }
                out.add_edge(g_.edge(e).id + "/" + std::to_string(i + 1), found->first, std::move(found->second));
            }
        }
        out_.insert(out);
    }

    bool next_tuple(std::vector<std::size_t>& t) const
    {
        for (std::size_t i = t.size(); i-- > 0;) {
            if (++t[i] < g_.num_vertices()) {
                return true;
            }
            t[i] = 0;
        }
        return false;
    }

    const TransductionScheme& theta_;
    const CGraph& g_;
    std::size_t set_limit_;
    std::vector<MsoFormula> conjuncts_;
    std::vector<std::set<std::string>> conjunct_params_;
    GraphSet out_;
};

} // namespace

GraphSet apply_transduction(const TransductionScheme& theta, const CGraph& g, std::size_t set_limit)
{
    for (const auto& l : g.labels()) {
        auto known = find_label(theta.input, l.name);
        if (!known || known->arity != l.arity) {
            throw Error(ErrorKind::AlphabetMismatch, "label " + l.name + " is not in the input alphabet");
        }
    }
    if (theta.layers.size() != theta.copies) {
        throw Error(ErrorKind::NonFunctionalScheme, "scheme needs one layer formula per copy");
    }
    bool trivially_false = false;
    {
        std::vector<MsoFormula> parts;
        split_conjuncts(theta.domain, parts);
        for (const auto& p : parts) {
            if (p.kind == MsoFormula::Kind::False) {
                trivially_false = true;
            }
        }
    }
    if (trivially_false) {
        return {};
    }
    return TransductionRunner(theta, g, set_limit).run();
}

TransductionScheme identity_scheme(const Alphabet& alphabet)
{
    TransductionScheme t;
    t.input = alphabet;
    t.output = alphabet;
    t.copies = 1;
    t.domain = MsoFormula::truth();
    t.layers = {MsoFormula::truth()};
    for (const auto& a : alphabet) {
        std::vector<std::string> vars;
        for (int i = 1; i <= a.arity + 1; ++i) {
            vars.push_back("x" + std::to_string(i));
        }
        t.edges[{a.name, std::vector<std::size_t>(static_cast<std::size_t>(a.arity) + 1, 1)}] =
            MsoFormula::edg(a.name, vars);
    }
    return t;
}

namespace {

std::string incidence_param(const Label& a, int i)
{
    return "X" + std::to_string(i) + "_" + a.name;
}

} // namespace

TransductionScheme fission_scheme(const Alphabet& alphabet)
{
    using F = MsoFormula;
    TransductionScheme t;
    t.input = alphabet;
    t.output = alphabet;
    t.copies = 2;
    t.parameters.push_back("X1");
    for (const auto& a : alphabet) {
        for (int i = 1; i <= a.arity; ++i) {
            t.parameters.push_back(incidence_param(a, i));
        }
    }
    std::vector<F> incidence_bounds;
    for (const auto& a : alphabet) {
        for (int i = 1; i <= a.arity; ++i) {
            incidence_bounds.push_back(
                F::implies(F::member(incidence_param(a, i), "x"),
                           F::exists("y", F::conj({F::member("X1", "y"),
                                                   F::incid(a.name, static_cast<std::size_t>(i), "x", "y")}))));
        }
    }
    F single = F::exists("x", F::conj({F::member("X1", "x"),
                                       F::forall("y", F::implies(F::member("X1", "y"), F::eq("y", "x")))}));
    t.domain = F::conj({std::move(single), F::forall("x", F::implies(F::member("X1", "x"), F::is_vertex("x"))),
                        F::forall("x", F::conj(std::move(incidence_bounds)))});
    t.layers = {F::truth(), F::member("X1", "x1")};
    for (const auto& a : alphabet) {
        const auto ar = static_cast<std::size_t>(a.arity);
        std::vector<std::string> vars;
        for (std::size_t i = 1; i <= ar + 1; ++i) {
            vars.push_back("x" + std::to_string(i));
        }
        std::vector<std::size_t> layers(ar + 1, 1);
        while (true) {
            std::vector<F> parts{F::edg(a.name, vars)};
            for (std::size_t k = 2; k <= ar + 1; ++k) {
                const std::string moved = incidence_param(a, static_cast<int>(k - 1));
                const std::string xk = "x" + std::to_string(k);
                if (layers[k - 1] == 1) {
                    parts.push_back(F::implies(F::member("X1", xk), F::member(moved, "x1")));
                } else {
                    parts.push_back(F::conj({F::member("X1", xk), F::negate(F::member(moved, "x1"))}));
                }
            }
            t.edges[{a.name, layers}] = F::conj(std::move(parts));
            std::size_t p = ar + 1;
            while (p > 1 && layers[p - 1] == 2) {
                layers[p - 1] = 1;
                --p;
            }
            if (p == 1) {
                break;
            }
            layers[p - 1] = 2;
        }
    }
    return t;
}

} // namespace slrkit
