#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cobord/error.hpp"

namespace cobord {

enum class TokenKind { Ident, Int, Sym };

struct Token {
    TokenKind kind;
    std::string text;
    int line;
    int column;
};

/// Splits one line into tokens; '#' starts a comment.
inline std::vector<Token> tokenize_line(std::string_view line, int line_no) {
    static constexpr std::string_view symbols[] = {"(x)", "->", ":", "=", ".", "(", ")", ",", "*",
                                                   "~",   "[",  "]", ";", "+", "-", "@"};
    std::vector<Token> out;
    std::size_t i = 0;
    auto ident_start = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
    auto ident_char = [&](char c) { return ident_start(c) || (c >= '0' && c <= '9') || c == '\''; };
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') break;
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        int col = static_cast<int>(i) + 1;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < line.size() && ident_char(line[j])) ++j;
            out.push_back({TokenKind::Ident, std::string(line.substr(i, j - i)), line_no, col});
            i = j;
            continue;
        }
        if (c >= '0' && c <= '9') {
            std::size_t j = i;
            while (j < line.size() && line[j] >= '0' && line[j] <= '9') ++j;
            out.push_back({TokenKind::Int, std::string(line.substr(i, j - i)), line_no, col});
            i = j;
            continue;
        }
        bool matched = false;
        for (auto s : symbols) {
            if (line.substr(i, s.size()) == s) {
                out.push_back({TokenKind::Sym, std::string(s), line_no, col});
                i += s.size();
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(line_no, col, "P000", std::string("unexpected character '") + c + "'");
    }
    return out;
}

class TokenCursor {
public:
    TokenCursor(const std::vector<Token>& tokens, int line, int end_column)
        : tokens_(tokens), line_(line), end_column_(end_column) {}

    bool at_end() const { return pos_ >= tokens_.size(); }
    const Token& peek() const { return tokens_.at(pos_); }
    bool peek_sym(std::string_view s) const {
        return !at_end() && tokens_[pos_].kind == TokenKind::Sym && tokens_[pos_].text == s;
    }
    bool peek_kind(TokenKind k) const { return !at_end() && tokens_[pos_].kind == k; }
    const Token& next() {
        if (at_end()) fail("unexpected end of input");
        return tokens_[pos_++];
    }
    int column() const {
        if (!at_end()) return tokens_[pos_].column;
        if (end_column_ > 0) return end_column_;
        return tokens_.empty() ? 1 : tokens_.back().column + static_cast<int>(tokens_.back().text.size());
    }
    const Token& expect_ident(const std::string& what) {
        if (!peek_kind(TokenKind::Ident)) fail("expected " + what);
        return tokens_[pos_++];
    }
    const Token& expect_int(const std::string& what) {
        if (!peek_kind(TokenKind::Int)) fail("expected " + what);
        return tokens_[pos_++];
    }
    void expect_sym(std::string_view s) {
        if (!peek_sym(s)) fail("expected '" + std::string(s) + "'");
        ++pos_;
    }
    void expect_keyword(std::string_view k) {
        if (!peek_kind(TokenKind::Ident) || tokens_[pos_].text != k) fail("expected '" + std::string(k) + "'");
        ++pos_;
    }
    void expect_end() {
        if (!at_end()) fail("unexpected '" + tokens_[pos_].text + "'");
    }
    [[noreturn]] void fail(const std::string& message) const {
        int ln = at_end() ? line_ : tokens_[pos_].line;
        throw ParseError(ln, column(), "P001", message);
    }

private:
    const std::vector<Token>& tokens_;
    std::size_t pos_ = 0;
    int line_;
    int end_column_;
};

}  // namespace cobord
