#include "soaforge/schema.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace soaforge::schema {

namespace {

struct Token {
    enum Kind { Ident, Number, Punct, End } kind = End;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, tok_.line, tok_.column);
    }

    Token expect_ident(const char* what) {
        if (tok_.kind != Token::Ident) fail(std::string("expected ") + what);
        return take();
    }

    void expect_punct(char c) {
        if (tok_.kind != Token::Punct || tok_.text[0] != c)
            fail(std::string("expected '") + c + "'");
        take();
    }

    bool accept_punct(char c) {
        if (tok_.kind == Token::Punct && tok_.text[0] == c) {
            take();
            return true;
        }
        return false;
    }

    bool accept_keyword(std::string_view kw) {
        if (tok_.kind == Token::Ident && tok_.text == kw) {
            take();
            return true;
        }
        return false;
    }

private:
    void advance() {
        // skip whitespace and # comments
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_, ++col_;
            } else if (c == '\n') {
                ++pos_;
                ++line_;
                col_ = 1;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
                ++col_;
            } else {
                break;
            }
        }
        tok_.line = line_;
        tok_.column = col_;
        if (pos_ >= text_.size()) {
            tok_ = {Token::End, "", line_, col_};
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_, ++col_;
            tok_ = {Token::Ident, std::string(text_.substr(start, pos_ - start)), tok_.line,
                    tok_.column};
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_, ++col_;
            tok_ = {Token::Number, std::string(text_.substr(start, pos_ - start)), tok_.line,
                    tok_.column};
        } else {
            tok_ = {Token::Punct, std::string(1, c), tok_.line, tok_.column};
            ++pos_;
            ++col_;
        }
    }

    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

FieldDecl parse_field(Lexer& lex) {
    FieldDecl f;
    f.name = lex.expect_ident("field name").text;
    lex.expect_punct(':');
    Token base = lex.expect_ident("base kind (f32|f64|i64)");
    if (base.text == "f32")
        f.base = BaseKind::F32;
    else if (base.text == "f64")
        f.base = BaseKind::F64;
    else if (base.text == "i64")
        f.base = BaseKind::I64;
    else
        throw ParseError("unknown base kind '" + base.text + "'", base.line, base.column);
    if (lex.peek().kind == Token::Ident && lex.peek().text == "x3") {
        lex.take();
        f.arity = 3;
    }
    if (lex.accept_punct('@')) {
        Token attr = lex.expect_ident("attribute");
        if (attr.text != "truncate")
            throw ParseError("unknown attribute '@" + attr.text + "'", attr.line, attr.column);
        lex.expect_punct('(');
        Token num = lex.take();
        if (num.kind != Token::Number)
            throw ParseError("expected truncation width", num.line, num.column);
        int width = std::stoi(num.text);
        if (!f.is_float())
            throw ParseError("@truncate is not allowed on i64 field '" + f.name + "'", attr.line,
                             attr.column);
        if (width < fpcodec::PrecisionSpec::kMinTotalBits ||
            width > fpcodec::PrecisionSpec::kMaxTotalBits)
            throw ParseError("truncation width " + num.text + " outside 7..64", num.line,
                             num.column);
        f.truncation = width;
        lex.expect_punct(')');
    }
    lex.expect_punct(';');
    return f;
}

std::vector<std::string> parse_name_list(Lexer& lex) {
    std::vector<std::string> names;
    names.push_back(lex.expect_ident("field name").text);
    while (true) {
        if (lex.accept_punct(',')) {
            names.push_back(lex.expect_ident("field name").text);
            continue;
        }
        const Token& t = lex.peek();
        if (t.kind == Token::Ident && t.text != "writes" && t.text != "reads") {
            names.push_back(lex.take().text);
            continue;
        }
        break;
    }
    return names;
}

KernelAccessSet parse_kernel(Lexer& lex) {
    KernelAccessSet set;
    set.kernel = lex.expect_ident("kernel name").text;
    if (lex.accept_keyword("reads")) set.reads = parse_name_list(lex);
    if (lex.accept_keyword("writes")) set.writes = parse_name_list(lex);
    if (set.reads.empty() && set.writes.empty())
        lex.fail("kernel '" + set.kernel + "' declares neither reads nor writes");
    lex.expect_punct(';');
    return set;
}

RecordSchema parse_schema_block(Lexer& lex) {
    RecordSchema schema;
    schema.name = lex.expect_ident("schema name").text;
    lex.expect_punct('{');
    while (!lex.accept_punct('}')) {
        Token kw = lex.take();
        if (kw.kind != Token::Ident || kw.text != "field")
            throw ParseError("expected 'field' or '}'", kw.line, kw.column);
        int line = lex.peek().line, col = lex.peek().column;
        FieldDecl f = parse_field(lex);
        for (const auto& existing : schema.fields)
            if (existing.name == f.name)
                throw ParseError("duplicate field '" + f.name + "'", line, col);
        schema.fields.push_back(std::move(f));
    }
    compute_layout(schema);
    return schema;
}

}  // namespace

int RecordSchema::field_index(std::string_view field_name) const {
    for (size_t i = 0; i < fields.size(); ++i)
        if (fields[i].name == field_name) return static_cast<int>(i);
    return -1;
}

const FieldDecl& RecordSchema::field(std::string_view field_name) const {
    int idx = field_index(field_name);
    if (idx < 0) throw std::invalid_argument("unknown field '" + std::string(field_name) + "'");
    return fields[idx];
}

void compute_layout(RecordSchema& schema) {
    schema.slots.clear();
    std::uint64_t offset = 0;
    for (const auto& f : schema.fields) {
        schema.slots.push_back({offset, f.stored_width()});
        offset += std::uint64_t(f.arity) * f.stored_width();
    }
    schema.record_bits = offset;
}

SchemaFile parse_file(std::string_view text) {
    Lexer lex(text);
    SchemaFile out;
    bool have_schema = false;
    while (lex.peek().kind != Token::End) {
        if (lex.accept_keyword("schema")) {
            if (have_schema) lex.fail("only one schema block per file");
            out.schema = parse_schema_block(lex);
            have_schema = true;
        } else if (lex.accept_keyword("kernel")) {
            out.kernels.push_back(parse_kernel(lex));
        } else {
            lex.fail("expected 'schema' or 'kernel'");
        }
    }
    if (!have_schema) throw ParseError("no schema block found", 1, 1);
    for (const auto& k : out.kernels) check_access_set(out.schema, k);
    return out;
}

RecordSchema parse_schema(std::string_view text) { return parse_file(text).schema; }

std::vector<KernelAccessSet> parse_access_sets(std::string_view text) {
    Lexer lex(text);
    std::vector<KernelAccessSet> sets;
    while (lex.peek().kind != Token::End) {
        if (!lex.accept_keyword("kernel")) lex.fail("expected 'kernel'");
        sets.push_back(parse_kernel(lex));
    }
    return sets;
}

SchemaFile load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schema file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_file(ss.str());
}

std::string print_schema(const RecordSchema& schema) {
    std::ostringstream out;
    out << "schema " << schema.name << " {\n";
    for (const auto& f : schema.fields) {
        out << "  field " << f.name << " : "
            << (f.base == BaseKind::F32 ? "f32" : f.base == BaseKind::F64 ? "f64" : "i64");
        if (f.arity == 3) out << " x3";
        if (f.truncation) out << " @truncate(" << *f.truncation << ")";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

std::string print_access_sets(const std::vector<KernelAccessSet>& sets) {
    std::ostringstream out;
    for (const auto& s : sets) {
        out << "kernel " << s.kernel;
        auto emit = [&](const char* kw, const std::vector<std::string>& names) {
            if (names.empty()) return;
            out << " " << kw << " ";
            for (size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << names[i];
        };
        emit("reads", s.reads);
        emit("writes", s.writes);
        out << ";\n";
    }
    return out.str();
}

RecordSchema with_uniform_precision(const RecordSchema& schema, int total_bits,
                                    const std::vector<std::string>& exclude) {
    if (total_bits < fpcodec::PrecisionSpec::kMinTotalBits ||
        total_bits > fpcodec::PrecisionSpec::kMaxTotalBits)
        throw std::invalid_argument("truncation width outside 7..64");
    RecordSchema out = schema;
    for (auto& f : out.fields) {
        if (!f.is_float()) continue;
        if (std::find(exclude.begin(), exclude.end(), f.name) != exclude.end()) continue;
        f.truncation = total_bits;
    }
    compute_layout(out);
    return out;
}

void check_access_set(const RecordSchema& schema, const KernelAccessSet& set) {
    for (const auto* names : {&set.reads, &set.writes})
        for (const auto& n : *names)
            if (schema.field_index(n) < 0)
                throw std::invalid_argument("kernel '" + set.kernel + "' names unknown field '" +
                                            n + "'");
}

}  // namespace soaforge::schema
