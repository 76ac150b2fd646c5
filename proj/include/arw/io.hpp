#ifndef ARW_IO_HPP
#define ARW_IO_HPP

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "arw/state.hpp"
#include "arw/topology.hpp"

namespace arw {

// Line-oriented text format.
//
//   config <vertex> <state>     state: 0 | rho | rho*<k> | <n>
//   array <vertex> <slots...>   slot tokens: s (sleep) | j<k> (jump to
//                               neighbor index k)
//
// Vertices use the topology's describe/parse forms: an integer on the
// line/cycle/path, "x,y" on the grid, a slash-separated root path on the
// tree. Blank lines and lines starting with '#' are ignored.

namespace io {

inline VertexId parse_vertex(const Topology& topo, const std::string& token) {
    std::optional<VertexId> v = topo.parse(token);
    if (!v) throw std::invalid_argument("unparseable vertex '" + token + "'");
    return *v;
}

inline SiteState parse_state(const std::string& token) {
    if (token == "0") return SiteState::empty();
    if (token == "rho") return SiteState::sleeping();
    if (token.rfind("rho*", 0) == 0) {
        int k = std::stoi(token.substr(4));
        if (k < 1) throw std::invalid_argument("bad state token '" + token + "'");
        return SiteState::sleeping_many(k);
    }
    int n = std::stoi(token);
    if (n < 1) throw std::invalid_argument("bad state token '" + token + "'");
    return SiteState::active(n);
}

inline std::string format_state(SiteState s) { return s.describe(); }

inline InstructionSlot parse_slot(const std::string& token) {
    if (token == "s") return InstructionSlot::sleep_slot();
    if (token.size() >= 2 && token[0] == 'j') {
        int idx = std::stoi(token.substr(1));
        if (idx < 0) throw std::invalid_argument("bad slot token '" + token + "'");
        return InstructionSlot::jump_slot(idx);
    }
    throw std::invalid_argument("bad slot token '" + token + "'");
}

inline std::string format_slot(const InstructionSlot& slot) {
    return slot.sleep ? "s" : "j" + std::to_string(slot.target);
}

struct Parsed {
    ParticleConfig config;
    std::unordered_map<VertexId, std::vector<InstructionSlot>, VertexIdHash> arrays;
};

/// Reads config and array lines; either kind may be absent.
inline Parsed read(const Topology& topo, std::istream& in) {
    Parsed out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind) || kind[0] == '#') continue;
        try {
            if (kind == "config") {
                std::string vtok, stok;
                if (!(ls >> vtok >> stok)) throw std::invalid_argument("missing fields");
                out.config.set(parse_vertex(topo, vtok), parse_state(stok));
            } else if (kind == "array") {
                std::string vtok;
                if (!(ls >> vtok)) throw std::invalid_argument("missing vertex");
                VertexId v = parse_vertex(topo, vtok);
                std::vector<InstructionSlot> slots;
                std::string tok;
                while (ls >> tok) slots.push_back(parse_slot(tok));
                out.arrays[v] = std::move(slots);
            } else {
                throw std::invalid_argument("unknown record '" + kind + "'");
            }
        } catch (const std::exception& e) {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline void write_config(const Topology& topo, const ParticleConfig& cfg,
                         const std::vector<VertexId>& order, std::ostream& out) {
    for (VertexId v : order) {
        SiteState s = cfg.get(v);
        if (!s.is_empty()) out << "config " << topo.describe(v) << " " << s.describe() << "\n";
    }
}

}  // namespace io

}  // namespace arw

#endif
