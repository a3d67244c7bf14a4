#pragma once

#include "fdmatch/instance.hpp"

#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace fdmatch {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace detail

/// Format:
///   model growing-tree|forest|general [weighted]
///   e <u> <v> [<w>]        w is an integer or p/q
/// `#` starts a comment; blank lines are ignored. The header must precede edges;
/// a missing header means an unweighted general stream.
inline InstanceStream parse_stream(std::string_view text)
{
    std::optional<StreamBuilder> builder;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tok = detail::split_ws(line);
        if (tok.empty()) continue;

        if (tok[0] == "model") {
            if (builder) throw ParseError(line_no, "duplicate or late model header");
            if (tok.size() < 2 || tok.size() > 3) throw ParseError(line_no, "malformed model header");
            ArrivalModel model;
            if (tok[1] == "growing-tree") model = ArrivalModel::GrowingTree;
            else if (tok[1] == "forest") model = ArrivalModel::Forest;
            else if (tok[1] == "general") model = ArrivalModel::General;
            else throw ParseError(line_no, "unknown model '" + std::string(tok[1]) + "'");
            bool weighted = false;
            if (tok.size() == 3) {
                if (tok[2] != "weighted") throw ParseError(line_no, "unexpected token '" + std::string(tok[2]) + "'");
                weighted = true;
            }
            builder.emplace(model, weighted);
            continue;
        }
        if (tok[0] != "e") throw ParseError(line_no, "unknown record '" + std::string(tok[0]) + "'");
        if (!builder) builder.emplace(ArrivalModel::General, false);
        bool weighted = builder->peek().weighted;
        if (tok.size() != (weighted ? 4u : 3u))
            throw ParseError(line_no, weighted ? "weighted edge needs 'e u v w'" : "unweighted edge needs 'e u v'");
        if (tok[1] == tok[2]) throw ParseError(line_no, "self-loop");
        std::optional<Rational> w;
        if (weighted) {
            w = Rational::parse(tok[3]);
            if (!w) throw ParseError(line_no, "bad rational literal '" + std::string(tok[3]) + "'");
            if (w->sign() <= 0) throw ParseError(line_no, "weight must be positive");
        }
        auto u = builder->vertex(std::string(tok[1]));
        auto v = builder->vertex(std::string(tok[2]));
        if (!seen.insert(std::minmax(u.value, v.value)).second) throw ParseError(line_no, "duplicate edge");
        builder->edge(u, v, std::move(w));
    }
    if (!builder) builder.emplace(ArrivalModel::General, false);
    return std::move(*builder).build();
}

inline std::string serialize_stream(const InstanceStream& s)
{
    std::ostringstream out;
    out << "model " << model_name(s.model);
    if (s.weighted) out << " weighted";
    out << '\n';
    for (const auto& ev : s.events) {
        out << "e " << s.name(ev.u) << ' ' << s.name(ev.v);
        if (s.weighted) out << ' ' << ev.weight.value_or(Rational(1)).str();
        out << '\n';
    }
    return out.str();
}

} // namespace fdmatch
