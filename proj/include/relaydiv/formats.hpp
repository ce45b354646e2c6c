// SPDX-License-Identifier: Apache-2.0
//
// relaydiv: diversity analysis toolkit for half-duplex linear relay networks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

/**
 * @file formats.hpp
 * @brief Text formats for relay schemes, codebooks and CSV output.
 *
 * Scheme and codebook files share one grammar:
 *
 * @code
 * # comment (anything after '#' is ignored, blank lines are skipped)
 * N 4 K 2          <- scheme header;  codebooks use "N 4 COUNT 16"
 * re im re im ...  <- 2N decimal numbers per line
 * @endcode
 *
 * A scheme file lists the N rows of G_1, then the N rows of G_2, and so on
 * (K*N data lines). A codebook file has one codeword per data line. Numbers are
 * parsed with std::from_chars (plain decimal or exponent notation, no locale) and
 * written with the shortest representation that round-trips exactly.
 */

#pragma once

#include "codebook.hpp"
#include "core.hpp"
#include "relay_schemes.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace relaydiv
{

inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc())
        throw InternalConsistency("number formatting failed");
    return std::string(buf, res.ptr);
}

inline std::string read_text_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidParameter("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string &path, const std::string &content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InvalidParameter("cannot open '" + path + "' for writing");
    out << content;
    if (!out.flush())
        throw InvalidParameter("failed writing '" + path + "'");
}

namespace detail
{

struct Token
{
    std::string_view text;
    std::size_t column; // 1-based
};

struct Line
{
    std::size_t number; // 1-based
    std::vector<Token> tokens;
};

// Splits into non-empty, comment-stripped lines of whitespace-separated tokens.
inline std::vector<Line> tokenize(std::string_view text)
{
    std::vector<Line> lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        Line line{line_no, {}};
        std::size_t i = 0;
        while (i < raw.size())
        {
            while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r'))
                ++i;
            const std::size_t start = i;
            while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' && raw[i] != '\r')
                ++i;
            if (i > start)
                line.tokens.push_back({raw.substr(start, i - start), start + 1});
        }
        if (!line.tokens.empty())
            lines.push_back(std::move(line));
        if (eol == std::string_view::npos)
            break;
        pos = eol + 1;
    }
    return lines;
}

inline double parse_number(const std::string &source, const Line &line, const Token &tok)
{
    double v = 0.0;
    const char *first = tok.text.data();
    const char *last = first + tok.text.size();
    if (first != last && *first == '+')
        ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
        throw ParseError(source, line.number, tok.column, "expected a finite decimal number, got '" +
                                                              std::string(tok.text) + "'");
    return v;
}

inline std::size_t parse_count(const std::string &source, const Line &line, const Token &tok)
{
    std::size_t v = 0;
    const char *first = tok.text.data();
    const char *last = first + tok.text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || v == 0)
        throw ParseError(source, line.number, tok.column,
                         "expected a positive integer, got '" + std::string(tok.text) + "'");
    return v;
}

struct Header
{
    std::size_t n = 0;
    std::size_t second = 0;
};

inline Header parse_header(const std::string &source, const std::vector<Line> &lines, std::string_view second_key)
{
    if (lines.empty())
        throw ParseError(source, 1, 1, "missing header 'N <int> " + std::string(second_key) + " <int>'");
    const Line &h = lines.front();
    if (h.tokens.size() != 4 || h.tokens[0].text != "N" || h.tokens[2].text != second_key)
        throw ParseError(source, h.number, h.tokens.front().column,
                         "header must read 'N <int> " + std::string(second_key) + " <int>'");
    return {parse_count(source, h, h.tokens[1]), parse_count(source, h, h.tokens[3])};
}

inline CVector parse_row(const std::string &source, const Line &line, std::size_t n)
{
    if (line.tokens.size() != 2 * n)
    {
        const std::size_t col = line.tokens.size() > 2 * n ? line.tokens[2 * n].column : line.tokens.back().column;
        throw ParseError(source, line.number, col,
                         "expected " + std::to_string(2 * n) + " numbers (re im pairs), got " +
                             std::to_string(line.tokens.size()));
    }
    CVector row(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c)
        row[static_cast<Eigen::Index>(c)] = {parse_number(source, line, line.tokens[2 * c]),
                                             parse_number(source, line, line.tokens[2 * c + 1])};
    return row;
}

inline void append_row(std::string &out, const auto &row)
{
    for (Eigen::Index c = 0; c < row.size(); ++c)
    {
        if (c > 0)
            out += ' ';
        out += format_double(row[c].real());
        out += ' ';
        out += format_double(row[c].imag());
    }
    out += '\n';
}

} // namespace detail

// Raw matrices from a scheme file; validation is left to custom_scheme.
inline std::vector<CMatrix> parse_scheme_matrices(std::string_view text, const std::string &source = "<scheme>")
{
    const auto lines = detail::tokenize(text);
    const auto header = detail::parse_header(source, lines, "K");
    const std::size_t n = header.n;
    const std::size_t k = header.second;
    const std::size_t expected = k * n;
    if (lines.size() - 1 != expected)
    {
        const auto &last = lines.back();
        throw ParseError(source, last.number, 1,
                         "expected " + std::to_string(expected) + " matrix rows, found " +
                             std::to_string(lines.size() - 1));
    }
    std::vector<CMatrix> mats(k, CMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    for (std::size_t i = 0; i < expected; ++i)
    {
        const auto row = detail::parse_row(source, lines[i + 1], n);
        mats[i / n].row(static_cast<Eigen::Index>(i % n)) = row.transpose();
    }
    return mats;
}

inline RelayScheme parse_scheme(std::string_view text, const std::string &source = "<scheme>",
                                PowerSplit split = PowerSplit::per_relay)
{
    return custom_scheme(parse_scheme_matrices(text, source), split);
}

inline RelayScheme load_scheme_file(const std::string &path, PowerSplit split = PowerSplit::per_relay)
{
    return parse_scheme(read_text_file(path), path, split);
}

inline std::string format_scheme(const RelayScheme &scheme)
{
    std::string out = "N " + std::to_string(scheme.block_length()) + " K " + std::to_string(scheme.relays()) + "\n";
    for (std::size_t i = 0; i < scheme.relays(); ++i)
    {
        out += "# G_" + std::to_string(i + 1) + "\n";
        const CMatrix &g = scheme.matrix(i);
        for (Eigen::Index r = 0; r < g.rows(); ++r)
            detail::append_row(out, g.row(r));
    }
    return out;
}

inline Codebook parse_codebook(std::string_view text, const std::string &source = "<codebook>")
{
    const auto lines = detail::tokenize(text);
    const auto header = detail::parse_header(source, lines, "COUNT");
    if (lines.size() - 1 != header.second)
    {
        const auto &last = lines.back();
        throw ParseError(source, last.number, 1,
                         "expected " + std::to_string(header.second) + " codewords, found " +
                             std::to_string(lines.size() - 1));
    }
    std::vector<CVector> words;
    words.reserve(header.second);
    for (std::size_t i = 1; i < lines.size(); ++i)
        words.push_back(detail::parse_row(source, lines[i], header.n));
    return make_codebook(std::move(words));
}

inline Codebook load_codebook_file(const std::string &path)
{
    return parse_codebook(read_text_file(path), path);
}

inline std::string format_codebook(const Codebook &book)
{
    std::string out =
        "N " + std::to_string(book.block_length) + " COUNT " + std::to_string(book.size()) + "\n";
    for (const auto &c : book.codewords)
        detail::append_row(out, c);
    return out;
}

} // namespace relaydiv
