#pragma once

// JSON encodings of exact objects. Rationals are written as integers when
// integral and as "p/q" strings otherwise; both forms are accepted on input,
// as are JSON floats where a real target is expected.

#include "flatlink/congruence.hpp"
#include "flatlink/construct.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace flatlink::io {

using json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline json to_json(const Rat& x) {
    if (x.get_den() == 1 && x.get_num().fits_slong_p()) return x.get_num().get_si();
    return x.get_str();
}

inline json to_json(const Int& x) {
    if (x.fits_slong_p()) return x.get_si();
    return x.get_str();
}

inline json to_json(const std::vector<Rat>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(to_json(x));
    return a;
}

inline json to_json(const std::vector<Int>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(to_json(x));
    return a;
}

inline json to_json(const QMatrix& m) {
    json a = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        a.push_back(std::move(row));
    }
    return a;
}

template <class Tag>
json to_json(const detail::PrimitiveVector<Tag>& v) {
    return to_json(v.rep);
}

inline Rat rat_from_json(const json& j) {
    if (j.is_number_integer()) return Rat(Int(j.dump()));
    if (j.is_string()) {
        try {
            return parse_rat(j.get<std::string>());
        } catch (const std::exception& e) {
            throw FormatError(std::string("bad rational: ") + e.what());
        }
    }
    throw FormatError("expected an integer or a \"p/q\" string, got " + j.dump());
}

inline std::vector<Rat> vector_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw FormatError("expected a nonempty array");
    std::vector<Rat> v;
    for (const auto& x : j) v.push_back(rat_from_json(x));
    return v;
}

inline QMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw FormatError("expected a nonempty array of rows");
    std::vector<std::vector<Rat>> rows;
    for (const auto& r : j) rows.push_back(vector_from_json(r));
    QMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) throw FormatError("ragged matrix");
        for (std::size_t j2 = 0; j2 < m.cols(); ++j2) m(i, j2) = rows[i][j2];
    }
    return m;
}

inline std::vector<double> reals_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw FormatError("expected a nonempty array of numbers");
    std::vector<double> v;
    for (const auto& x : j) {
        if (x.is_number()) v.push_back(x.get<double>());
        else v.push_back(rat_from_json(x).get_d());
    }
    return v;
}

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed JSON: ") + e.what());
    }
}

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline constexpr int kSchemaVersion = 1;

inline json certificate(const std::string& kind, const json& inputs, json verdicts) {
    json c;
    c["kind"] = kind;
    c["inputs_digest"] = fnv1a(inputs.dump());
    c["verdicts"] = std::move(verdicts);
#ifdef FLATLINK_VERSION
    c["versions"] = {{"tool", FLATLINK_VERSION}, {"schema", kSchemaVersion}};
#else
    c["versions"] = {{"tool", "dev"}, {"schema", kSchemaVersion}};
#endif
    return c;
}

// ---------------------------------------------------------------------------

inline Arrangement arrangement_from_json(const json& j) {
    std::vector<ProjPoint> pts;
    const json& a = field(j, "points");
    if (!a.is_array()) throw FormatError("\"points\" must be an array");
    for (const auto& p : a) pts.emplace_back(vector_from_json(p));
    return Arrangement(pts);
}

inline json to_json(const Arrangement& arr) {
    json a = json::array();
    for (const auto& p : arr.points()) a.push_back(to_json(p));
    return a;
}

/// {"line": [..], "plane": [..]}.
inline LinePlanePair pair_from_json(const json& j) {
    return LinePlanePair(ProjPoint(vector_from_json(field(j, "line"))), ProjHyperplane(vector_from_json(field(j, "plane"))));
}

inline json to_json(const LinkResult& r) {
    json j;
    j["linked"] = r.linked();
    j["sigma"] = r.sigma.signs;
    j["witness_values"] = to_json(r.witness_values);
    return j;
}

inline json to_json(const IntersectionResult& r) {
    json j;
    j["kind"] = to_string(r.kind);
    j["kernel_dim"] = r.kernel_dim;
    j["point"] = r.point ? to_json(r.point->Z) : json(nullptr);
    j["sign"] = r.sign ? json(*r.sign) : json(nullptr);
    return j;
}

inline json to_json(const IrredCertificate& c) {
    json j;
    j["verdict"] = to_string(c.verdict);
    j["witness_prime"] = c.witness_prime ? json(*c.witness_prime) : json(nullptr);
    json pats = json::array();
    for (const auto& pp : c.patterns) pats.push_back({{"prime", pp.prime}, {"degrees", pp.degrees}});
    j["patterns"] = std::move(pats);
    return j;
}

inline json to_json(const RationalizedTau& r) {
    json j;
    j["tau"] = to_json(r.tau);
    j["base"] = to_json(r.base);
    j["conjugator"] = to_json(r.g);
    auto cp = char_poly(r.tau).coeffs();
    j["char_poly_ascending"] = to_json(std::vector<Rat>(cp.begin(), cp.end()));
    j["sturm_count"] = r.sturm_count;
    j["irreducibility"] = to_json(r.irred);
    j["frame_distance_bound"] = to_json(r.frame_distance);
    j["unit_determinant"] = r.unit_determinant;
    return j;
}

inline json to_json(const Pattern& p) {
    json j;
    j["N"] = p.N;
    j["m"] = p.m;
    json flats = json::array();
    for (std::size_t i = 0; i < p.N; ++i) {
        json f;
        if (p.frames[i]) f["points"] = to_json(*p.frames[i]);
        f["tau"] = to_json(p.flats[i].tau);
        flats.push_back(std::move(f));
    }
    j["flats"] = std::move(flats);
    json ys = json::array();
    for (const auto& y : p.subspaces)
        ys.push_back({{"line", to_json(y.line)}, {"plane", to_json(y.plane)}, {"rho", to_json(y.rho)}});
    j["subspaces"] = std::move(ys);
    j["matrix"] = p.matrix;
    json cells = json::array();
    for (std::size_t i = 0; i < p.N; ++i)
        for (std::size_t k = 0; k < p.N; ++k) {
            const auto& c = p.cells[i][k];
            json cj{{"i", i}, {"j", k}, {"oracle", to_string(c.oracle)}};
            cj["linked"] = c.link ? json(c.link->linked()) : json(nullptr);
            cj["sign"] = c.sign ? json(*c.sign) : json(nullptr);
            cj["point"] = c.point ? to_json(*c.point) : json(nullptr);
            cells.push_back(std::move(cj));
        }
    j["certificate"] = {{"cells", std::move(cells)},
                        {"rank", pattern_rank(p)},
                        {"thinness", to_json(p.thinness)},
                        {"rotation", to_json(p.rotation)},
                        {"attempts", p.attempts}};
    return j;
}

/// Rebuilds and recertifies a pattern from its file; the stored matrix must
/// agree with the recomputed one.
inline Pattern pattern_from_json(const json& j) {
    const json& fl = field(j, "flats");
    const json& ys = field(j, "subspaces");
    if (!fl.is_array() || !ys.is_array() || fl.size() != ys.size() || fl.empty())
        throw FormatError("\"flats\" and \"subspaces\" must be nonempty arrays of equal length");
    std::vector<std::optional<Arrangement>> frames;
    std::vector<FlatX> flats;
    for (const auto& f : fl) {
        if (f.contains("points")) {
            Arrangement arr = arrangement_from_json(f);
            QMatrix tau = f.contains("tau") ? matrix_from_json(f.at("tau")) : detail::tau_for_frame(arr.frame());
            frames.emplace_back(std::move(arr));
            flats.push_back(flat_from_tau(tau));
        } else {
            frames.emplace_back(std::nullopt);
            flats.push_back(flat_from_tau(matrix_from_json(field(f, "tau"))));
        }
    }
    std::vector<SubspaceY> subs;
    for (const auto& y : ys) {
        if (y.contains("line")) subs.push_back(subspace_from_pair(pair_from_json(y)));
        else subs.push_back(subspace_from_rho(matrix_from_json(field(y, "rho"))));
    }
    Pattern p = build_pattern(std::move(frames), std::move(flats), std::move(subs));
    if (j.contains("matrix") && j.at("matrix") != json(p.matrix))
        throw FormatError("stored matrix does not match the recomputed pattern");
    return p;
}

inline json to_json(const SignedHit& h) {
    return {{"gamma", to_json(h.gamma)}, {"sign", h.sign}, {"point", to_json(h.point.Z)}};
}

inline json to_json(const Decomposition& d) { return {{"a", to_json(d.a)}, {"b", to_json(d.b)}}; }

}  // namespace flatlink::io
