#include "slrkit/slr.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "slrkit/error.hpp"

namespace slrkit {

SlrFormula SlrFormula::emp()
{
    return SlrFormula{};
}

SlrFormula SlrFormula::eq(std::string x, std::string y)
{
    return SlrFormula{Kind::Eq, {}, {std::move(x), std::move(y)}, {}};
}

SlrFormula SlrFormula::neq(std::string x, std::string y)
{
    return SlrFormula{Kind::Neq, {}, {std::move(x), std::move(y)}, {}};
}

SlrFormula SlrFormula::rel(std::string label, std::vector<std::string> args)
{
    return SlrFormula{Kind::Rel, std::move(label), std::move(args), {}};
}

SlrFormula SlrFormula::pred(std::string name, std::vector<std::string> args)
{
    return SlrFormula{Kind::Pred, std::move(name), std::move(args), {}};
}

SlrFormula SlrFormula::sep(std::vector<SlrFormula> parts)
{
    std::vector<SlrFormula> flat;
    for (auto& p : parts) {
        if (p.kind == Kind::Sep) {
            for (auto& c : p.children) {
                flat.push_back(std::move(c));
            }
        } else {
            flat.push_back(std::move(p));
        }
    }
    if (flat.empty()) {
        return emp();
    }
    if (flat.size() == 1) {
        return std::move(flat.front());
    }
    return SlrFormula{Kind::Sep, {}, {}, std::move(flat)};
}

SlrFormula SlrFormula::exists(std::string var, SlrFormula body)
{
    SlrFormula f{Kind::Exists, std::move(var), {}, {}};
    f.children.push_back(std::move(body));
    return f;
}

SlrFormula SlrFormula::exists(const std::vector<std::string>& vars, SlrFormula body)
{
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        body = exists(*it, std::move(body));
    }
    return body;
}

namespace {

void collect_free(const SlrFormula& f, std::set<std::string>& bound, std::set<std::string>& out)
{
    using K = SlrFormula::Kind;
    switch (f.kind) {
    case K::Emp:
        return;
    case K::Eq:
    case K::Neq:
    case K::Rel:
    case K::Pred:
        for (const auto& a : f.args) {
            if (!bound.count(a)) {
                out.insert(a);
            }
        }
        return;
    case K::Sep:
        for (const auto& c : f.children) {
            collect_free(c, bound, out);
        }
        return;
    case K::Exists: {
        const bool fresh = bound.insert(f.name).second;
        collect_free(f.children.front(), bound, out);
        if (fresh) {
            bound.erase(f.name);
        }
        return;
    }
    }
}

bool all_nodes(const SlrFormula& f, bool (*ok)(const SlrFormula&))
{
    if (!ok(f)) {
        return false;
    }
    return std::all_of(f.children.begin(), f.children.end(),
                       [&](const SlrFormula& c) { return all_nodes(c, ok); });
}

} // namespace

std::set<std::string> free_vars(const SlrFormula& f)
{
    std::set<std::string> bound;
    std::set<std::string> out;
    collect_free(f, bound, out);
    return out;
}

bool is_qpf(const SlrFormula& f)
{
    return all_nodes(f, [](const SlrFormula& g) {
        return g.kind != SlrFormula::Kind::Exists && g.kind != SlrFormula::Kind::Pred;
    });
}

bool is_predicate_free(const SlrFormula& f)
{
    return all_nodes(f, [](const SlrFormula& g) { return g.kind != SlrFormula::Kind::Pred; });
}

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid)
{
    for (std::size_t i = 1;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (!avoid.count(candidate)) {
            return candidate;
        }
    }
}

void all_names(const SlrFormula& f, std::set<std::string>& out)
{
    if (f.kind == SlrFormula::Kind::Exists) {
        out.insert(f.name);
    }
    for (const auto& a : f.args) {
        out.insert(a);
    }
    for (const auto& c : f.children) {
        all_names(c, out);
    }
}

SlrFormula rename_rec(const SlrFormula& f, std::map<std::string, std::string> renaming,
                      const std::set<std::string>& avoid)
{
    using K = SlrFormula::Kind;
    SlrFormula out = f;
    switch (f.kind) {
    case K::Emp:
        return out;
    case K::Eq:
    case K::Neq:
    case K::Rel:
    case K::Pred:
        for (auto& a : out.args) {
            if (auto it = renaming.find(a); it != renaming.end()) {
                a = it->second;
            }
        }
        return out;
    case K::Sep:
        for (auto& c : out.children) {
            c = rename_rec(c, renaming, avoid);
        }
        return out;
    case K::Exists: {
        renaming.erase(f.name);
        bool captured = false;
        for (const auto& [from, to] : renaming) {
            if (to == f.name) {
                captured = true;
            }
        }
        if (captured) {
            std::set<std::string> taken = avoid;
            for (const auto& [from, to] : renaming) {
                taken.insert(to);
            }
            std::string fresh = fresh_name(f.name, taken);
            renaming[f.name] = fresh;
            out.name = fresh;
        }
        out.children.front() = rename_rec(f.children.front(), renaming, avoid);
        return out;
    }
    }
    return out;
}

} // namespace

SlrFormula rename_free(const SlrFormula& f, const std::map<std::string, std::string>& renaming)
{
    std::set<std::string> avoid;
    all_names(f, avoid);
    return rename_rec(f, renaming, avoid);
}

std::string to_string(const SlrFormula& f)
{
    using K = SlrFormula::Kind;
    auto args = [&]() {
        std::string s = "(";
        for (std::size_t i = 0; i < f.args.size(); ++i) {
            s += (i ? "," : "") + f.args[i];
        }
        return s + ")";
    };
    switch (f.kind) {
    case K::Emp:
        return "emp";
    case K::Eq:
        return f.args[0] + " = " + f.args[1];
    case K::Neq:
        return f.args[0] + " != " + f.args[1];
    case K::Rel:
    case K::Pred:
        return f.name + args();
    case K::Sep: {
        std::string s;
        for (std::size_t i = 0; i < f.children.size(); ++i) {
            const auto& c = f.children[i];
            const bool wrap = c.kind == K::Exists || c.kind == K::Sep;
            s += (i ? " * " : "") + (wrap ? "(" + to_string(c) + ")" : to_string(c));
        }
        return s;
    }
    case K::Exists: {
        std::string s = "exists";
        const SlrFormula* g = &f;
        while (g->kind == K::Exists) {
            s += " " + g->name;
            g = &g->children.front();
        }
        return s + " . " + to_string(*g);
    }
    }
    return {};
}

std::vector<SlrFormula> sep_operands(const SlrFormula& f)
{
    if (f.kind == SlrFormula::Kind::Sep) {
        return f.children;
    }
    return {f};
}

std::optional<PrenexBody> prenex_body(const SlrFormula& f)
{
    PrenexBody out;
    const SlrFormula* g = &f;
    while (g->kind == SlrFormula::Kind::Exists) {
        out.exists.push_back(g->name);
        g = &g->children.front();
    }
    for (const auto& a : sep_operands(*g)) {
        if (a.kind == SlrFormula::Kind::Exists || a.kind == SlrFormula::Kind::Sep) {
            return std::nullopt;
        }
        out.atoms.push_back(a);
    }
    return out;
}

std::size_t Sid::arity(const std::string& pred) const
{
    auto it = predicates.find(pred);
    if (it == predicates.end()) {
        throw Error(ErrorKind::UndeclaredSymbol, "unknown predicate " + pred);
    }
    return it->second;
}

std::vector<const Rule*> Sid::rules_of(const std::string& pred) const
{
    std::vector<const Rule*> out;
    for (const auto& r : rules) {
        if (r.head == pred) {
            out.push_back(&r);
        }
    }
    return out;
}

const Rule* Sid::find_rule(std::string_view id) const
{
    for (const auto& r : rules) {
        if (r.id == id) {
            return &r;
        }
    }
    return nullptr;
}

namespace {

void check_scoping(const Sid& sid, const SlrFormula& f, std::set<std::string>& scope, const std::string& where)
{
    using K = SlrFormula::Kind;
    auto check_vars = [&]() {
        for (const auto& a : f.args) {
            if (!scope.count(a)) {
                throw Error(ErrorKind::UndeclaredSymbol, where + ": free variable " + a);
            }
        }
    };
    switch (f.kind) {
    case K::Emp:
        return;
    case K::Eq:
    case K::Neq:
        check_vars();
        return;
    case K::Rel: {
        if (f.name == kDisequalityName) {
            throw Error(ErrorKind::ReservedLabel, where + ": label d__ is reserved");
        }
        auto label = find_label(sid.alphabet, f.name);
        if (!label) {
            throw Error(ErrorKind::UndeclaredSymbol, where + ": unknown label " + f.name);
        }
        if (static_cast<std::size_t>(label->arity) != f.args.size()) {
            throw Error(ErrorKind::ArityError, where + ": label " + f.name + " expects " +
                                                   std::to_string(label->arity) + " arguments");
        }
        check_vars();
        return;
    }
    case K::Pred: {
        auto it = sid.predicates.find(f.name);
        if (it == sid.predicates.end()) {
            throw Error(ErrorKind::UndeclaredSymbol, where + ": unknown predicate " + f.name);
        }
        if (it->second != f.args.size()) {
            throw Error(ErrorKind::ArityError, where + ": predicate " + f.name + " expects " +
                                                   std::to_string(it->second) + " arguments");
        }
        check_vars();
        return;
    }
    case K::Sep:
        for (const auto& c : f.children) {
            check_scoping(sid, c, scope, where);
        }
        return;
    case K::Exists: {
        if (scope.count(f.name)) {
            throw Error(ErrorKind::SyntaxError, where + ": variable " + f.name + " is already bound");
        }
        scope.insert(f.name);
        check_scoping(sid, f.children.front(), scope, where);
        scope.erase(f.name);
        return;
    }
    }
}

} // namespace

void finalize_sid(Sid& sid)
{
    for (const auto& l : sid.alphabet) {
        if (l.name == kDisequalityName) {
            throw Error(ErrorKind::ReservedLabel, "label d__ is reserved");
        }
        if (sid.predicates.count(l.name)) {
            throw Error(ErrorKind::SyntaxError, l.name + " is both a label and a predicate");
        }
    }
    std::map<std::string, std::size_t> counter;
    for (auto& r : sid.rules) {
        auto it = sid.predicates.find(r.head);
        if (it == sid.predicates.end()) {
            sid.predicates.emplace(r.head, r.params.size());
        } else if (it->second != r.params.size()) {
            throw Error(ErrorKind::ArityError, "predicate " + r.head + " used with two arities");
        }
    }
    for (auto& r : sid.rules) {
        r.id = r.head + "." + std::to_string(counter[r.head]++);
        std::set<std::string> scope(r.params.begin(), r.params.end());
        if (scope.size() != r.params.size()) {
            throw Error(ErrorKind::SyntaxError, "rule " + r.id + ": repeated parameter");
        }
        check_scoping(sid, r.body, scope, "rule " + r.id);
    }
}

namespace {

struct Token {
    enum class Kind { Ident, Number, Punct, End };
    Kind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector<Token> tokenize(std::string_view text)
{
    std::vector<Token> out;
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
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                                       text[j] == '\'' || text[j] == '@')) {
                ++j;
            }
            out.push_back({Token::Kind::Ident, std::string(text.substr(i, j - i)), l, co});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
                ++j;
            }
            out.push_back({Token::Kind::Number, std::string(text.substr(i, j - i)), l, co});
            advance(j - i);
            continue;
        }
        for (std::string_view p : {"<=", "!=", "(", ")", ",", ";", ".", "*", "/", "="}) {
            if (text.substr(i, p.size()) == p) {
                out.push_back({Token::Kind::Punct, std::string(p), l, co});
                advance(p.size());
                goto next;
            }
        }
        throw Error(ErrorKind::SyntaxError, "line " + std::to_string(l) + ", column " + std::to_string(co) +
                                                ": unexpected character '" + std::string(1, c) + "'");
    next:;
    }
    out.push_back({Token::Kind::End, "", line, col});
    return out;
}

std::string at(const Token& t)
{
    return "line " + std::to_string(t.line) + ", column " + std::to_string(t.column);
}

// Formula before atom names are resolved into labels and predicates.
struct Raw {
    enum class Kind { Emp, Eq, Neq, Atom, Sep, Exists } kind = Kind::Emp;
    std::string name;
    std::vector<std::string> args;
    std::vector<std::string> vars;
    std::vector<Raw> children;
    Token where;
};

struct RawRule {
    std::string head;
    std::vector<std::string> params;
    Raw body;
    Token where;
};

class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

    Sid parse_file()
    {
        std::vector<Label> labels;
        std::vector<std::pair<std::string, std::pair<std::size_t, Token>>> declared;
        std::vector<RawRule> raw_rules;
        bool have_alphabet = false;
        while (peek().kind != Token::Kind::End) {
            if (peek_ident("alphabet")) {
                if (have_alphabet) {
                    throw Error(ErrorKind::SyntaxError, at(peek()) + ": alphabet declared twice");
                }
                have_alphabet = true;
                next();
                if (!peek_punct(";")) {
                    do {
                        const Token t = peek();
                        auto [name, ar] = declaration();
                        if (name == kDisequalityName) {
                            throw Error(ErrorKind::ReservedLabel, at(t) + ": label d__ is reserved");
                        }
                        if (ar < 1) {
                            throw Error(ErrorKind::ArityError, at(t) + ": label " + name + " needs arity >= 1");
                        }
                        labels.push_back({name, static_cast<int>(ar)});
                    } while (accept(","));
                }
                expect(";");
            } else if (peek_ident("predicates")) {
                next();
                if (!peek_punct(";")) {
                    do {
                        const Token t = peek();
                        auto [name, ar] = declaration();
                        declared.push_back({name, {ar, t}});
                    } while (accept(","));
                }
                expect(";");
            } else {
                raw_rules.push_back(rule());
            }
        }

        Sid sid;
        {
            std::set<std::string> names;
            for (const auto& l : labels) {
                if (!names.insert(l.name).second) {
                    throw Error(ErrorKind::SyntaxError, "label " + l.name + " declared twice");
                }
            }
        }
        sid.alphabet = make_alphabet(labels);
        for (const auto& [name, info] : declared) {
            if (!sid.predicates.emplace(name, info.first).second) {
                throw Error(ErrorKind::SyntaxError, at(info.second) + ": predicate " + name + " declared twice");
            }
        }
        for (const auto& r : raw_rules) {
            auto [it, fresh] = sid.predicates.emplace(r.head, r.params.size());
            if (!fresh && it->second != r.params.size()) {
                throw Error(ErrorKind::ArityError, at(r.where) + ": predicate " + r.head + " has arity " +
                                                       std::to_string(it->second));
            }
            if (find_label(sid.alphabet, r.head)) {
                throw Error(ErrorKind::SyntaxError, at(r.where) + ": " + r.head + " is a label");
            }
        }
        for (const auto& r : raw_rules) {
            std::set<std::string> scope;
            for (const auto& p : r.params) {
                if (!scope.insert(p).second) {
                    throw Error(ErrorKind::SyntaxError, at(r.where) + ": repeated parameter " + p);
                }
            }
            Rule rule;
            rule.head = r.head;
            rule.params = r.params;
            rule.body = resolve(sid, r.body, scope);
            sid.rules.push_back(std::move(rule));
        }
        finalize_sid(sid);
        return sid;
    }

    SlrFormula parse_formula(const Sid& context, const std::vector<std::string>& vars)
    {
        Raw raw = sep();
        if (peek().kind != Token::Kind::End) {
            throw Error(ErrorKind::SyntaxError, at(peek()) + ": trailing input");
        }
        std::set<std::string> scope(vars.begin(), vars.end());
        return resolve(context, raw, scope);
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_++]; }
    bool peek_ident(std::string_view s) const
    {
        return peek().kind == Token::Kind::Ident && peek().text == s;
    }
    bool peek_punct(std::string_view s) const
    {
        return peek().kind == Token::Kind::Punct && peek().text == s;
    }
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
            throw Error(ErrorKind::SyntaxError, at(peek()) + ": expected '" + std::string(s) + "'");
        }
    }
    std::string ident()
    {
        if (peek().kind != Token::Kind::Ident) {
            throw Error(ErrorKind::SyntaxError, at(peek()) + ": expected identifier");
        }
        return next().text;
    }

    std::pair<std::string, std::size_t> declaration()
    {
        std::string name = ident();
        expect("/");
        if (peek().kind != Token::Kind::Number) {
            throw Error(ErrorKind::SyntaxError, at(peek()) + ": expected arity");
        }
        return {name, static_cast<std::size_t>(std::stoul(next().text))};
    }

    std::vector<std::string> ident_list_in_parens()
    {
        std::vector<std::string> out;
        expect("(");
        if (!accept(")")) {
            do {
                out.push_back(ident());
            } while (accept(","));
            expect(")");
        }
        return out;
    }

    RawRule rule()
    {
        RawRule r;
        r.where = peek();
        r.head = ident();
        if (peek_punct("(")) {
            r.params = ident_list_in_parens();
        }
        expect("<=");
        r.body = sep();
        expect(";");
        return r;
    }

    Raw sep()
    {
        Raw out;
        out.kind = Raw::Kind::Sep;
        out.where = peek();
        while (true) {
            if (peek_ident("exists")) {
                Raw q;
                q.kind = Raw::Kind::Exists;
                q.where = next();
                do {
                    q.vars.push_back(ident());
                } while (peek().kind == Token::Kind::Ident);
                expect(".");
                q.children.push_back(sep());
                out.children.push_back(std::move(q));
                break;
            }
            out.children.push_back(unit());
            if (!accept("*")) {
                break;
            }
        }
        if (out.children.size() == 1) {
            return std::move(out.children.front());
        }
        return out;
    }

    Raw unit()
    {
        Raw out;
        out.where = peek();
        if (accept("(")) {
            out = sep();
            expect(")");
            return out;
        }
        if (peek_ident("emp")) {
            next();
            out.kind = Raw::Kind::Emp;
            return out;
        }
        std::string name = ident();
        if (accept("=")) {
            out.kind = Raw::Kind::Eq;
            out.args = {name, ident()};
            return out;
        }
        if (accept("!=")) {
            out.kind = Raw::Kind::Neq;
            out.args = {name, ident()};
            return out;
        }
        out.kind = Raw::Kind::Atom;
        out.name = std::move(name);
        if (peek_punct("(")) {
            out.args = ident_list_in_parens();
        }
        return out;
    }

    SlrFormula resolve(const Sid& sid, const Raw& raw, std::set<std::string>& scope)
    {
        auto check_var = [&](const std::string& v) {
            if (!scope.count(v)) {
                throw Error(ErrorKind::UndeclaredSymbol, at(raw.where) + ": free variable " + v);
            }
        };
        switch (raw.kind) {
        case Raw::Kind::Emp:
            return SlrFormula::emp();
        case Raw::Kind::Eq:
        case Raw::Kind::Neq:
            for (const auto& a : raw.args) {
                check_var(a);
            }
            return raw.kind == Raw::Kind::Eq ? SlrFormula::eq(raw.args[0], raw.args[1])
                                             : SlrFormula::neq(raw.args[0], raw.args[1]);
        case Raw::Kind::Atom: {
            if (raw.name == kDisequalityName) {
                throw Error(ErrorKind::ReservedLabel, at(raw.where) + ": label d__ is reserved");
            }
            std::size_t expected = 0;
            bool relation = false;
            if (auto label = find_label(sid.alphabet, raw.name)) {
                expected = static_cast<std::size_t>(label->arity);
                relation = true;
            } else if (auto it = sid.predicates.find(raw.name); it != sid.predicates.end()) {
                expected = it->second;
            } else {
                throw Error(ErrorKind::UndeclaredSymbol, at(raw.where) + ": unknown symbol " + raw.name);
            }
            if (expected != raw.args.size()) {
                throw Error(ErrorKind::ArityError, at(raw.where) + ": " + raw.name + " expects " +
                                                       std::to_string(expected) + " arguments");
            }
            for (const auto& a : raw.args) {
                check_var(a);
            }
            return relation ? SlrFormula::rel(raw.name, raw.args) : SlrFormula::pred(raw.name, raw.args);
        }
        case Raw::Kind::Sep: {
            std::vector<SlrFormula> parts;
            for (const auto& c : raw.children) {
                parts.push_back(resolve(sid, c, scope));
            }
            return SlrFormula::sep(std::move(parts));
        }
        case Raw::Kind::Exists: {
            for (const auto& v : raw.vars) {
                if (!scope.insert(v).second) {
                    throw Error(ErrorKind::SyntaxError, at(raw.where) + ": variable " + v + " is already bound");
                }
            }
            SlrFormula body = resolve(sid, raw.children.front(), scope);
            for (const auto& v : raw.vars) {
                scope.erase(v);
            }
            return SlrFormula::exists(raw.vars, std::move(body));
        }
        }
        return SlrFormula::emp();
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

Sid parse_sid(std::string_view text)
{
    return Parser(text).parse_file();
}

Sid read_sid_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_sid(buffer.str());
}

std::string print_sid(const Sid& sid)
{
    std::ostringstream out;
    out << "alphabet ";
    for (std::size_t i = 0; i < sid.alphabet.size(); ++i) {
        out << (i ? ", " : "") << sid.alphabet[i].name << "/" << sid.alphabet[i].arity;
    }
    out << " ;\n";
    out << "predicates ";
    std::size_t i = 0;
    for (const auto& [name, ar] : sid.predicates) {
        out << (i++ ? ", " : "") << name << "/" << ar;
    }
    out << " ;\n";
    for (const auto& r : sid.rules) {
        out << r.head << "(";
        for (std::size_t k = 0; k < r.params.size(); ++k) {
            out << (k ? "," : "") << r.params[k];
        }
        out << ") <= " << to_string(r.body) << " ;\n";
    }
    return out.str();
}

SlrFormula parse_slr_formula(std::string_view text, const Sid& context, const std::vector<std::string>& vars)
{
    return Parser(text).parse_formula(context, vars);
}

} // namespace slrkit
