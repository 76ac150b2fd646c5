#ifndef ARW_TOPOLOGY_HPP
#define ARW_TOPOLOGY_HPP

#include <cstdint>
#include <cstdlib>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace arw {

/// Opaque 64-bit vertex encoding. The packing is a bijection on the
/// reachable vertex set of each topology and is part of the
/// reproducibility contract (it keys the counter-based random source).
struct VertexId {
    std::uint64_t raw{0};
    friend bool operator==(const VertexId&, const VertexId&) = default;
    friend auto operator<=>(const VertexId&, const VertexId&) = default;
};

struct VertexIdHash {
    std::size_t operator()(VertexId v) const noexcept {
        std::uint64_t z = v.raw + 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return static_cast<std::size_t>(z ^ (z >> 31));
    }
};

enum class TopologyKind { Line, Grid2d, RegularTree, Cycle, Path };

/// Infinite (or finite, for cycle/path) locally-finite graph accessed
/// through vertex encoding and neighbor enumeration. Immutable after
/// construction; safe to share between concurrent engine instances.
///
/// Neighbor order is fixed per topology:
///   line     : [x-1, x+1]
///   grid2d   : [(x-1,y), (x+1,y), (x,y-1), (x,y+1)]
///   tree(r)  : root -> [child 0, ..., child r-1];
///              other -> [parent, child 0, ..., child r-2]
///   cycle(n) : [(v+n-1) mod n, (v+1) mod n]
///   path(n)  : interior [v-1, v+1]; endpoints have a single neighbor
class Topology {
public:
    static Topology line() { return Topology(TopologyKind::Line, 0); }
    static Topology grid2d() { return Topology(TopologyKind::Grid2d, 0); }
    static Topology regular_tree(int degree) {
        if (degree < 3) throw std::invalid_argument("regular_tree: degree must be >= 3");
        return Topology(TopologyKind::RegularTree, degree);
    }
    static Topology cycle(int n) {
        if (n < 3) throw std::invalid_argument("cycle: n must be >= 3");
        return Topology(TopologyKind::Cycle, n);
    }
    static Topology path(int n) {
        if (n < 2) throw std::invalid_argument("path: n must be >= 2");
        return Topology(TopologyKind::Path, n);
    }

    TopologyKind kind() const { return kind_; }
    int param() const { return param_; }

    VertexId origin() const {
        switch (kind_) {
            case TopologyKind::RegularTree: return VertexId{1};
            default: return VertexId{0};
        }
    }

    // -- coordinate packing -------------------------------------------------

    static VertexId line_vertex(std::int64_t x) {
        return VertexId{static_cast<std::uint64_t>(x)};
    }
    static std::int64_t line_coord(VertexId v) {
        return static_cast<std::int64_t>(v.raw);
    }
    static VertexId grid_vertex(std::int32_t x, std::int32_t y) {
        return VertexId{(static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
                        static_cast<std::uint64_t>(static_cast<std::uint32_t>(y))};
    }
    static std::int32_t grid_x(VertexId v) {
        return static_cast<std::int32_t>(static_cast<std::uint32_t>(v.raw >> 32));
    }
    static std::int32_t grid_y(VertexId v) {
        return static_cast<std::int32_t>(static_cast<std::uint32_t>(v.raw & 0xffffffffULL));
    }

    bool valid(VertexId v) const {
        switch (kind_) {
            case TopologyKind::Line:
            case TopologyKind::Grid2d:
                return true;
            case TopologyKind::Cycle:
            case TopologyKind::Path:
                return v.raw < static_cast<std::uint64_t>(param_);
            case TopologyKind::RegularTree: {
                // Digits in base r with sentinel 1; only the first step from
                // the root may use the full digit range [0, r).
                if (v.raw == 0) return false;
                std::uint64_t w = v.raw;
                const std::uint64_t r = static_cast<std::uint64_t>(param_);
                while (w > 1) {
                    std::uint64_t d = w % r;
                    w /= r;
                    if (w == 0) return false;
                    if (w > 1 && d > r - 2) return false;
                }
                return true;
            }
        }
        return false;
    }

    int degree(VertexId v) const {
        require_valid(v);
        switch (kind_) {
            case TopologyKind::Line: return 2;
            case TopologyKind::Grid2d: return 4;
            case TopologyKind::RegularTree: return param_;
            case TopologyKind::Cycle: return 2;
            case TopologyKind::Path:
                return (v.raw == 0 || v.raw == static_cast<std::uint64_t>(param_ - 1)) ? 1 : 2;
        }
        return 0;
    }

    std::vector<VertexId> neighbors(VertexId v) const {
        require_valid(v);
        std::vector<VertexId> out;
        switch (kind_) {
            case TopologyKind::Line: {
                std::int64_t x = line_coord(v);
                out = {line_vertex(x - 1), line_vertex(x + 1)};
                break;
            }
            case TopologyKind::Grid2d: {
                std::int32_t x = grid_x(v), y = grid_y(v);
                out = {grid_vertex(x - 1, y), grid_vertex(x + 1, y),
                       grid_vertex(x, y - 1), grid_vertex(x, y + 1)};
                break;
            }
            case TopologyKind::RegularTree: {
                const std::uint64_t r = static_cast<std::uint64_t>(param_);
                if (v.raw != 1) out.push_back(VertexId{v.raw / r});
                const int children = (v.raw == 1) ? param_ : param_ - 1;
                if (v.raw > (~0ULL) / r - static_cast<std::uint64_t>(children))
                    throw std::overflow_error("regular_tree: vertex encoding depth exceeded");
                for (int d = 0; d < children; ++d)
                    out.push_back(VertexId{v.raw * r + static_cast<std::uint64_t>(d)});
                break;
            }
            case TopologyKind::Cycle: {
                const std::uint64_t n = static_cast<std::uint64_t>(param_);
                out = {VertexId{(v.raw + n - 1) % n}, VertexId{(v.raw + 1) % n}};
                break;
            }
            case TopologyKind::Path: {
                if (v.raw > 0) out.push_back(VertexId{v.raw - 1});
                if (v.raw + 1 < static_cast<std::uint64_t>(param_)) out.push_back(VertexId{v.raw + 1});
                break;
            }
        }
        return out;
    }

    /// Vertices at graph distance <= radius from o, in BFS discovery order.
    std::vector<VertexId> ball(VertexId o, int radius) const {
        if (radius < 0) throw std::invalid_argument("ball: radius must be >= 0");
        require_valid(o);
        std::vector<VertexId> out{o};
        std::unordered_set<VertexId, VertexIdHash> seen{o};
        std::deque<std::pair<VertexId, int>> q{{o, 0}};
        while (!q.empty()) {
            auto [v, d] = q.front();
            q.pop_front();
            if (d == radius) continue;
            for (VertexId w : neighbors(v)) {
                if (seen.insert(w).second) {
                    out.push_back(w);
                    q.emplace_back(w, d + 1);
                }
            }
        }
        return out;
    }

    std::string describe(VertexId v) const {
        switch (kind_) {
            case TopologyKind::Line: return std::to_string(line_coord(v));
            case TopologyKind::Grid2d:
                return std::to_string(grid_x(v)) + "," + std::to_string(grid_y(v));
            default: return std::to_string(v.raw);
        }
    }

    /// Inverse of describe(); std::nullopt on malformed input or an
    /// encoding that is not a vertex of this topology.
    std::optional<VertexId> parse(const std::string& text) const {
        auto as_int = [](const std::string& s, std::int64_t& out) {
            if (s.empty()) return false;
            char* end = nullptr;
            errno = 0;
            long long v = std::strtoll(s.c_str(), &end, 10);
            if (errno != 0 || end != s.c_str() + s.size()) return false;
            out = v;
            return true;
        };
        VertexId v;
        switch (kind_) {
            case TopologyKind::Line: {
                std::int64_t x;
                if (!as_int(text, x)) return std::nullopt;
                v = line_vertex(x);
                break;
            }
            case TopologyKind::Grid2d: {
                auto comma = text.find(',');
                if (comma == std::string::npos) return std::nullopt;
                std::int64_t x, y;
                if (!as_int(text.substr(0, comma), x) || !as_int(text.substr(comma + 1), y))
                    return std::nullopt;
                if (x < INT32_MIN || x > INT32_MAX || y < INT32_MIN || y > INT32_MAX)
                    return std::nullopt;
                v = grid_vertex(static_cast<std::int32_t>(x), static_cast<std::int32_t>(y));
                break;
            }
            default: {
                std::int64_t raw;
                if (!as_int(text, raw) || raw < 0) return std::nullopt;
                v = VertexId{static_cast<std::uint64_t>(raw)};
                break;
            }
        }
        return valid(v) ? std::optional<VertexId>(v) : std::nullopt;
    }

    friend bool operator==(const Topology&, const Topology&) = default;

private:
    Topology(TopologyKind k, int p) : kind_(k), param_(p) {}

    void require_valid(VertexId v) const {
        if (!valid(v)) throw std::invalid_argument("invalid vertex encoding for topology");
    }

    TopologyKind kind_;
    int param_;
};

}  // namespace arw

#endif
