#include "gpe/pointcloud.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace gpe {

namespace fs = std::filesystem;

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "train";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    throw ConfigError("unknown split name: " + name);
}

std::vector<int> Dataset::indices_of(Split s) const {
    std::vector<int> out;
    for (size_t i = 0; i < clouds.size(); ++i)
        if (splits[i] == s) out.push_back(static_cast<int>(i));
    return out;
}

namespace {

struct LineCursor {
    std::string_view text;
    size_t pos = 0;
    int line_no = 0;

    // next non-empty line, or nullopt at end of input
    std::optional<std::string_view> next() {
        while (pos < text.size()) {
            size_t eol = text.find('\n', pos);
            if (eol == std::string_view::npos) eol = text.size();
            std::string_view line = text.substr(pos, eol - pos);
            pos = eol + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            size_t first = line.find_first_not_of(" \t");
            if (first == std::string_view::npos) continue;
            if (line[first] == '#') continue;
            return line;
        }
        return std::nullopt;
    }
};

std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> toks;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) toks.push_back(line.substr(i, j - i));
        i = j;
    }
    return toks;
}

double parse_double(std::string_view tok, int line_no) {
    double v;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ParseError(line_no, "expected a number, got '" + std::string(tok) + "'");
    if (!std::isfinite(v)) throw ParseError(line_no, "non-finite coordinate");
    return v;
}

long parse_long(std::string_view tok, int line_no) {
    long v;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ParseError(line_no, "expected an integer, got '" + std::string(tok) + "'");
    return v;
}

Vec3 parse_vertex_line(std::string_view line, int line_no) {
    auto toks = tokenize(line);
    if (toks.size() < 3) throw ParseError(line_no, "expected 3 coordinates");
    return {parse_double(toks[0], line_no), parse_double(toks[1], line_no),
            parse_double(toks[2], line_no)};
}

}  // namespace

PointCloud parse_off(std::string_view text) {
    LineCursor cur{text};
    auto first = cur.next();
    if (!first) throw ParseError(1, "empty OFF input");

    std::string_view counts_line = *first;
    int counts_line_no = cur.line_no;
    if (counts_line.substr(0, 3) == "OFF") {
        std::string_view rest = counts_line.substr(3);
        if (rest.find_first_not_of(" \t") == std::string_view::npos) {
            auto second = cur.next();
            if (!second) throw ParseError(cur.line_no, "missing counts line");
            counts_line = *second;
            counts_line_no = cur.line_no;
        } else {
            counts_line = rest;  // fused header: "OFF3 1 0"
        }
    }

    auto toks = tokenize(counts_line);
    if (toks.size() < 2) throw ParseError(counts_line_no, "expected 'nv nf [ne]' counts");
    long nv = parse_long(toks[0], counts_line_no);
    if (nv < 1) throw ParseError(counts_line_no, "vertex count must be >= 1");

    PointCloud cloud;
    cloud.points.reserve(static_cast<size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        auto line = cur.next();
        if (!line) throw ParseError(cur.line_no, "truncated: missing vertex " + std::to_string(i));
        cloud.points.push_back(parse_vertex_line(*line, cur.line_no));
    }
    // faces ignored
    return cloud;
}

PointCloud parse_xyz(std::string_view text) {
    LineCursor cur{text};
    PointCloud cloud;
    while (auto line = cur.next()) {
        cloud.points.push_back(parse_vertex_line(*line, cur.line_no));
    }
    if (cloud.points.empty()) throw ParseError(cur.line_no > 0 ? cur.line_no : 1, "no points");
    return cloud;
}

PointCloud parse_ply_ascii(std::string_view text) {
    LineCursor cur{text};
    auto magic = cur.next();
    if (!magic || tokenize(*magic)[0] != "ply") throw ParseError(1, "missing 'ply' magic");

    long n_vertices = -1;
    int xi = -1, yi = -1, zi = -1;
    int prop_idx = 0;
    bool in_vertex_element = false;
    bool ascii = false;
    while (true) {
        auto line = cur.next();
        if (!line) throw ParseError(cur.line_no, "truncated header");
        auto toks = tokenize(*line);
        if (toks.empty()) continue;
        if (toks[0] == "format") {
            if (toks.size() < 2 || toks[1] != "ascii")
                throw ParseError(cur.line_no, "only ascii PLY is supported");
            ascii = true;
        } else if (toks[0] == "element") {
            in_vertex_element = toks.size() >= 3 && toks[1] == "vertex";
            if (in_vertex_element) n_vertices = parse_long(toks[2], cur.line_no);
            prop_idx = 0;
        } else if (toks[0] == "property" && in_vertex_element) {
            if (toks.size() >= 3) {
                if (toks.back() == "x") xi = prop_idx;
                if (toks.back() == "y") yi = prop_idx;
                if (toks.back() == "z") zi = prop_idx;
            }
            ++prop_idx;
        } else if (toks[0] == "end_header") {
            break;
        }
    }
    if (!ascii) throw ParseError(cur.line_no, "missing ascii format line");
    if (n_vertices < 1) throw ParseError(cur.line_no, "missing vertex element");
    if (xi < 0 || yi < 0 || zi < 0) throw ParseError(cur.line_no, "vertex element lacks x/y/z");

    PointCloud cloud;
    cloud.points.reserve(static_cast<size_t>(n_vertices));
    for (long i = 0; i < n_vertices; ++i) {
        auto line = cur.next();
        if (!line) throw ParseError(cur.line_no, "truncated: missing vertex " + std::to_string(i));
        auto toks = tokenize(*line);
        int need = std::max({xi, yi, zi});
        if (static_cast<int>(toks.size()) <= need)
            throw ParseError(cur.line_no, "vertex line too short");
        cloud.points.push_back({parse_double(toks[xi], cur.line_no),
                                parse_double(toks[yi], cur.line_no),
                                parse_double(toks[zi], cur.line_no)});
    }
    return cloud;
}

PointCloud load_cloud(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    std::string ext = fs::path(path).extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));
    if (ext == ".off") return parse_off(text);
    if (ext == ".ply") return parse_ply_ascii(text);
    if (ext == ".xyz" || ext == ".txt" || ext == ".pts") return parse_xyz(text);
    throw Error("unsupported point cloud extension: " + path);
}

void save_xyz(const PointCloud& cloud, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    char buf[96];
    for (const Vec3& p : cloud.points) {
        int n = std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x, p.y, p.z);
        out.write(buf, n);
    }
}

PointCloud normalize(const PointCloud& cloud) {
    if (cloud.points.empty()) throw DegenerateCloud("empty cloud");
    Vec3 centroid{0, 0, 0};
    for (const Vec3& p : cloud.points) centroid += p;
    centroid *= 1.0 / static_cast<double>(cloud.points.size());

    double max_sq = 0;
    for (const Vec3& p : cloud.points) max_sq = std::max(max_sq, (p - centroid).squared_norm());
    if (max_sq < 1e-24) throw DegenerateCloud("all points coincide");

    double inv = 1.0 / std::sqrt(max_sq);
    PointCloud out;
    out.label = cloud.label;
    out.points.reserve(cloud.points.size());
    for (const Vec3& p : cloud.points) out.points.push_back((p - centroid) * inv);
    return out;
}

AugmentPolicy augment_policy_from_name(const std::string& name) {
    if (name == "none") return AugmentPolicy::None;
    if (name == "modelnet") return AugmentPolicy::ModelNet;
    if (name == "scanobject") return AugmentPolicy::ScanObject;
    throw ConfigError("unknown augment policy: " + name);
}

PointCloud augment(const PointCloud& cloud, uint64_t seed, AugmentPolicy policy) {
    PointCloud out;
    out.label = cloud.label;
    out.points.reserve(cloud.points.size());
    Rng rng(seed);
    switch (policy) {
        case AugmentPolicy::None:
            out.points = cloud.points;
            break;
        case AugmentPolicy::ModelNet: {
            double s = rng.uniform(0.8, 1.2);
            Vec3 offset{rng.normal() * 0.01, rng.normal() * 0.01, rng.normal() * 0.01};
            for (const Vec3& p : cloud.points) out.points.push_back(p * s + offset);
            break;
        }
        case AugmentPolicy::ScanObject: {
            double theta = rng.uniform(0.0, 2.0 * M_PI);
            double c = std::cos(theta), s = std::sin(theta);
            for (const Vec3& p : cloud.points)
                out.points.push_back({c * p.x + s * p.z, p.y, -s * p.x + c * p.z});
            break;
        }
    }
    return out;
}

std::vector<int> fps(const PointCloud& cloud, int m, int start_index) {
    int n = cloud.size();
    if (m < 1 || m > n) throw Error("fps: m out of range");
    if (start_index < 0 || start_index >= n) throw Error("fps: start index out of range");

    std::vector<int> picked;
    picked.reserve(m);
    std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
    int current = start_index;
    picked.push_back(current);
    for (int s = 1; s < m; ++s) {
        const Vec3& c = cloud.points[current];
        int best = -1;
        double best_d = -1.0;
        for (int i = 0; i < n; ++i) {
            double d = (cloud.points[i] - c).squared_norm();
            if (d < min_d[i]) min_d[i] = d;
            if (min_d[i] > best_d) {  // strict '>' keeps the lowest index on ties
                best_d = min_d[i];
                best = i;
            }
        }
        current = best;
        picked.push_back(current);
    }
    return picked;
}

PatchSet knn_group(const PointCloud& cloud, const std::vector<Vec3>& centers, int k) {
    int n = cloud.size();
    if (k < 1 || k > n) throw Error("knn_group: k out of range");

    PatchSet ps;
    ps.centers = centers;
    ps.patches.resize(centers.size());
    std::vector<std::pair<double, int>> dist(n);
    for (size_t c = 0; c < centers.size(); ++c) {
        for (int i = 0; i < n; ++i)
            dist[i] = {(cloud.points[i] - centers[c]).squared_norm(), i};
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        auto& patch = ps.patches[c];
        patch.reserve(k);
        for (int j = 0; j < k; ++j) patch.push_back(cloud.points[dist[j].second] - centers[c]);
    }
    return ps;
}

namespace {

constexpr double kJitterSigma = 0.01;

Vec3 unit_direction(Rng& rng) {
    for (;;) {
        Vec3 v{rng.normal(), rng.normal(), rng.normal()};
        double n = v.norm();
        if (n > 1e-9) return v * (1.0 / n);
    }
}

// Gaussian jitter with norm clamped at sigma, so surface classes keep a
// provable radial band after normalization.
Vec3 jitter(Rng& rng) {
    Vec3 g{rng.normal() * kJitterSigma, rng.normal() * kJitterSigma,
           rng.normal() * kJitterSigma};
    double n = g.norm();
    if (n > kJitterSigma) g *= kJitterSigma / n;
    return g;
}

Vec3 sample_sphere(Rng& rng) { return unit_direction(rng); }

Vec3 sample_cube(Rng& rng) {
    int face = static_cast<int>(rng.uniform_int(6));
    double u = rng.uniform(-1.0, 1.0), v = rng.uniform(-1.0, 1.0);
    double s = (face % 2 == 0) ? 1.0 : -1.0;
    switch (face / 2) {
        case 0: return {s, u, v};
        case 1: return {u, s, v};
        default: return {u, v, s};
    }
}

Vec3 sample_cone(Rng& rng) {
    // apex (0,1,0), base circle radius 1 at y=-1; lateral and base surfaces
    // weighted by area
    double lateral_area = M_PI * std::sqrt(5.0);
    double base_area = M_PI;
    double theta = rng.uniform(0.0, 2.0 * M_PI);
    if (rng.uniform() * (lateral_area + base_area) < base_area) {
        double r = std::sqrt(rng.uniform());
        return {r * std::cos(theta), -1.0, r * std::sin(theta)};
    }
    double h = std::sqrt(rng.uniform());  // density grows toward the base
    return {h * std::cos(theta), 1.0 - 2.0 * h, h * std::sin(theta)};
}

Vec3 sample_torus(Rng& rng) {
    constexpr double R = 1.0, r = 0.4;
    for (;;) {
        double u = rng.uniform(0.0, 2.0 * M_PI);
        double v = rng.uniform(0.0, 2.0 * M_PI);
        // rejection keeps sampling uniform over the surface area
        if (rng.uniform() * (1.0 + r / R) > 1.0 + (r / R) * std::cos(v)) continue;
        double ring = R + r * std::cos(v);
        return {ring * std::cos(u), r * std::sin(v), ring * std::sin(u)};
    }
}

}  // namespace

Dataset synth_dataset(uint64_t seed, int n_per_class, int n_points) {
    if (n_per_class < 1) throw Error("synth_dataset: n_per_class must be >= 1");
    if (n_points < 1) throw Error("synth_dataset: n_points must be >= 1");

    Dataset ds;
    ds.name = "synthetic4";
    ds.class_names = {"sphere", "cube", "cone", "torus"};

    for (int cls = 0; cls < 4; ++cls) {
        for (int i = 0; i < n_per_class; ++i) {
            Rng rng(mix_seed(seed, mix_seed(cls, i)));
            PointCloud cloud;
            cloud.label = cls;
            cloud.points.reserve(n_points);
            // antithetic pairs keep the centroid near the origin for the
            // centrally symmetric classes
            bool symmetric = cls != 2;
            Vec3 held{};
            for (int p = 0; p < n_points; ++p) {
                Vec3 pt;
                if (symmetric && (p % 2 == 1)) {
                    pt = -held;
                } else {
                    switch (cls) {
                        case 0: pt = sample_sphere(rng); break;
                        case 1: pt = sample_cube(rng); break;
                        case 2: pt = sample_cone(rng); break;
                        default: pt = sample_torus(rng); break;
                    }
                    pt += jitter(rng);
                    held = pt;
                }
                cloud.points.push_back(pt);
            }
            ds.clouds.push_back(normalize(cloud));
            ds.splits.push_back((i % 4 == 3) ? Split::Val : Split::Train);
        }
    }
    return ds;
}

Dataset load_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw Error("cannot open manifest " + manifest_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(std::string("manifest parse failure: ") + e.what());
    }

    Dataset ds;
    ds.name = j.value("name", "dataset");
    ds.class_names = j.at("class_names").get<std::vector<std::string>>();
    fs::path base = fs::path(manifest_path).parent_path();
    for (const auto& rec : j.at("records")) {
        std::string path = rec.at("path").get<std::string>();
        int label = rec.at("label").get<int>();
        if (label < 0 || label >= ds.n_classes())
            throw Error("manifest label out of range: " + std::to_string(label));
        fs::path full = fs::path(path).is_absolute() ? fs::path(path) : base / path;
        PointCloud cloud = load_cloud(full.string());
        cloud.label = label;
        ds.clouds.push_back(std::move(cloud));
        ds.splits.push_back(split_from_name(rec.at("split").get<std::string>()));
    }
    return ds;
}

void save_manifest(const Dataset& ds, const std::vector<std::string>& rel_paths,
                   const std::string& manifest_path) {
    if (rel_paths.size() != ds.clouds.size())
        throw Error("save_manifest: path count mismatch");
    nlohmann::json j;
    j["name"] = ds.name;
    j["class_names"] = ds.class_names;
    auto& records = j["records"] = nlohmann::json::array();
    for (size_t i = 0; i < ds.clouds.size(); ++i) {
        records.push_back({{"path", rel_paths[i]},
                           {"label", ds.clouds[i].label.value_or(0)},
                           {"split", split_name(ds.splits[i])}});
    }
    std::ofstream out(manifest_path);
    if (!out) throw Error("cannot write manifest " + manifest_path);
    out << j.dump(2) << "\n";
}

}  // namespace gpe
