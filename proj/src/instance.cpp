#include "limo/instance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "limo/rng.hpp"

namespace limo {

namespace {

// TSPLIB95 reference constants. PI is the document's truncated value, not
// M_PI; using the full-precision constant changes GEO distances.
constexpr double kGeoPi = 3.141592;
constexpr double kGeoRadius = 6378.388;

double nint(double x) { return std::floor(x + 0.5); }

// DDD.MM coordinate to radians; the degree part is truncated toward zero.
double geo_radians(double x) {
    double deg = std::trunc(x);
    double min = x - deg;
    return kGeoPi * (deg + 5.0 * min / 3.0) / 180.0;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

std::string_view metric_name(Metric m) {
    switch (m) {
    case Metric::EUC_2D: return "EUC_2D";
    case Metric::CEIL_2D: return "CEIL_2D";
    case Metric::GEO: return "GEO";
    case Metric::ATT: return "ATT";
    case Metric::EXPLICIT: return "EXPLICIT";
    case Metric::REAL_EUC: return "REAL_EUC";
    }
    return "?";
}

Instance Instance::parse_tsplib(const std::string& text) {
    Instance inst;
    int dimension = -1;
    std::string ew_type, ew_format = "FULL_MATRIX";
    std::vector<double> matrix_values;
    std::vector<std::pair<bool, Point>> coord_slots;

    std::istringstream in(text);
    std::string line;
    enum class Section { header, coords, weights, skip } section = Section::header;
    int skip_remaining = 0;

    auto is_keyword_line = [](const std::string& s) {
        return !s.empty() && (std::isalpha(static_cast<unsigned char>(s[0])) != 0);
    };

    while (std::getline(in, line)) {
        std::string s = trim(line);
        if (s.empty()) continue;
        if (s == "EOF") break;

        if (section == Section::skip) {
            if (skip_remaining > 0) {
                --skip_remaining;
                continue;
            }
            section = Section::header;
        }

        if (section == Section::coords || section == Section::weights) {
            if (is_keyword_line(s)) {
                section = Section::header; // fall through to keyword handling
            } else {
                std::istringstream ls(s);
                if (section == Section::coords) {
                    int idx;
                    double x, y;
                    if (!(ls >> idx >> x >> y))
                        throw ParseError("malformed NODE_COORD_SECTION line: " + s);
                    if (idx < 1 || idx > dimension)
                        throw ParseError("coordinate index out of range: " + std::to_string(idx));
                    coord_slots[static_cast<size_t>(idx - 1)] = {true, Point{x, y}};
                } else {
                    double v;
                    while (ls >> v) matrix_values.push_back(v);
                }
                continue;
            }
        }

        // Header keyword, "KEY : value" or "KEY: value" or bare section name.
        std::string key = s, value;
        if (auto colon = s.find(':'); colon != std::string::npos) {
            key = trim(s.substr(0, colon));
            value = trim(s.substr(colon + 1));
        }

        if (key == "NAME") {
            inst.name_ = value;
        } else if (key == "DIMENSION") {
            try {
                dimension = std::stoi(value);
            } catch (const std::exception&) {
                throw ParseError("bad DIMENSION value: " + value);
            }
            if (dimension < 2) throw ParseError("DIMENSION must be >= 2");
            coord_slots.assign(static_cast<size_t>(dimension), {false, Point{}});
        } else if (key == "EDGE_WEIGHT_TYPE") {
            ew_type = value;
        } else if (key == "EDGE_WEIGHT_FORMAT") {
            ew_format = value;
        } else if (key == "NODE_COORD_SECTION") {
            if (dimension < 0) throw ParseError("NODE_COORD_SECTION before DIMENSION");
            section = Section::coords;
        } else if (key == "EDGE_WEIGHT_SECTION") {
            if (dimension < 0) throw ParseError("EDGE_WEIGHT_SECTION before DIMENSION");
            section = Section::weights;
        } else if (key == "DISPLAY_DATA_SECTION") {
            section = Section::skip;
            skip_remaining = dimension;
        } else {
            // TYPE, COMMENT, DISPLAY_DATA_TYPE, NODE_COORD_TYPE, ...
            continue;
        }
    }

    if (dimension < 0) throw ParseError("missing DIMENSION");
    inst.n_ = dimension;

    if (ew_type == "EUC_2D") inst.metric_ = Metric::EUC_2D;
    else if (ew_type == "CEIL_2D") inst.metric_ = Metric::CEIL_2D;
    else if (ew_type == "GEO") inst.metric_ = Metric::GEO;
    else if (ew_type == "ATT") inst.metric_ = Metric::ATT;
    else if (ew_type == "EXPLICIT") inst.metric_ = Metric::EXPLICIT;
    else throw ParseError("unsupported EDGE_WEIGHT_TYPE: " + (ew_type.empty() ? "<missing>" : ew_type));

    const auto n = static_cast<size_t>(dimension);
    if (inst.metric_ == Metric::EXPLICIT) {
        auto& w = inst.weights_;
        w.assign(n * n, 0.0);
        const auto& v = matrix_values;
        size_t need;
        if (ew_format == "FULL_MATRIX") need = n * n;
        else if (ew_format == "UPPER_ROW") need = n * (n - 1) / 2;
        else if (ew_format == "LOWER_DIAG_ROW") need = n * (n + 1) / 2;
        else throw ParseError("unsupported EDGE_WEIGHT_FORMAT: " + ew_format);
        if (v.size() != need)
            throw ParseError("EDGE_WEIGHT_SECTION has " + std::to_string(v.size()) +
                             " values, expected " + std::to_string(need));

        size_t k = 0;
        if (ew_format == "FULL_MATRIX") {
            w = v;
        } else if (ew_format == "UPPER_ROW") {
            for (size_t i = 0; i < n; ++i)
                for (size_t j = i + 1; j < n; ++j, ++k) w[i * n + j] = w[j * n + i] = v[k];
        } else { // LOWER_DIAG_ROW
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j <= i; ++j, ++k) w[i * n + j] = w[j * n + i] = v[k];
        }
        for (size_t i = 0; i < n; ++i) {
            if (w[i * n + i] != 0.0) throw ParseError("nonzero diagonal in explicit matrix");
            for (size_t j = 0; j < n; ++j) {
                double d = w[i * n + j];
                if (d < 0.0 || !std::isfinite(d)) throw ParseError("invalid explicit weight");
                if (d != w[j * n + i]) throw ParseError("asymmetric explicit matrix");
            }
        }
    } else {
        size_t have = 0;
        for (auto& [set, p] : coord_slots) have += set ? 1 : 0;
        if (have != n)
            throw ParseError("DIMENSION is " + std::to_string(dimension) + " but " +
                             std::to_string(have) + " coordinates were given");
        inst.coords_.reserve(n);
        for (auto& [set, p] : coord_slots) inst.coords_.push_back(p);
    }

    if (inst.metric_ == Metric::GEO) {
        inst.geo_lat_.resize(n);
        inst.geo_lon_.resize(n);
        for (size_t i = 0; i < n; ++i) {
            inst.geo_lat_[i] = geo_radians(inst.coords_[i].x);
            inst.geo_lon_[i] = geo_radians(inst.coords_[i].y);
        }
    }
    return inst;
}

Instance Instance::load_tsplib(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    Instance inst = parse_tsplib(ss.str());
    if (inst.name_.empty()) inst.name_ = file.stem().string();
    return inst;
}

Instance Instance::random_uniform(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("random instance needs n >= 2");
    Instance inst;
    inst.name_ = "random_n" + std::to_string(n) + "_s" + std::to_string(seed);
    inst.n_ = n;
    inst.metric_ = Metric::REAL_EUC;
    Rng rng(seed);
    inst.coords_.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = rng.uniform01();
        double y = rng.uniform01();
        inst.coords_.push_back({x, y});
    }
    return inst;
}

Instance Instance::from_points(std::string name, std::vector<Point> coords, Metric metric) {
    if (metric == Metric::EXPLICIT) throw std::invalid_argument("EXPLICIT needs a matrix");
    if (coords.size() < 2) throw std::invalid_argument("instance needs n >= 2");
    Instance inst;
    inst.name_ = std::move(name);
    inst.n_ = static_cast<int>(coords.size());
    inst.metric_ = metric;
    inst.coords_ = std::move(coords);
    if (metric == Metric::GEO) {
        inst.geo_lat_.resize(inst.coords_.size());
        inst.geo_lon_.resize(inst.coords_.size());
        for (size_t i = 0; i < inst.coords_.size(); ++i) {
            inst.geo_lat_[i] = geo_radians(inst.coords_[i].x);
            inst.geo_lon_[i] = geo_radians(inst.coords_[i].y);
        }
    }
    return inst;
}

Instance Instance::from_matrix(std::string name, int n, std::vector<double> weights) {
    if (n < 2) throw std::invalid_argument("instance needs n >= 2");
    if (weights.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
        throw std::invalid_argument("weight matrix must be n*n");
    const auto un = static_cast<size_t>(n);
    for (size_t i = 0; i < un; ++i) {
        if (weights[i * un + i] != 0.0) throw std::invalid_argument("nonzero diagonal");
        for (size_t j = 0; j < un; ++j) {
            double d = weights[i * un + j];
            if (d < 0.0 || !std::isfinite(d) || d != weights[j * un + i])
                throw std::invalid_argument("matrix must be symmetric and non-negative");
        }
    }
    Instance inst;
    inst.name_ = std::move(name);
    inst.n_ = n;
    inst.metric_ = Metric::EXPLICIT;
    inst.weights_ = std::move(weights);
    return inst;
}

double Instance::distance(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
        throw std::out_of_range("city index out of range: (" + std::to_string(i) + "," +
                                std::to_string(j) + ") with n=" + std::to_string(n_));
    if (i == j) return 0.0;
    switch (metric_) {
    case Metric::EXPLICIT:
        return weights_[static_cast<size_t>(i) * static_cast<size_t>(n_) + static_cast<size_t>(j)];
    case Metric::REAL_EUC: {
        double dx = coords_[i].x - coords_[j].x, dy = coords_[i].y - coords_[j].y;
        return std::sqrt(dx * dx + dy * dy);
    }
    case Metric::EUC_2D: {
        double dx = coords_[i].x - coords_[j].x, dy = coords_[i].y - coords_[j].y;
        return nint(std::sqrt(dx * dx + dy * dy));
    }
    case Metric::CEIL_2D: {
        double dx = coords_[i].x - coords_[j].x, dy = coords_[i].y - coords_[j].y;
        return std::ceil(std::sqrt(dx * dx + dy * dy));
    }
    case Metric::ATT: {
        double dx = coords_[i].x - coords_[j].x, dy = coords_[i].y - coords_[j].y;
        double r = std::sqrt((dx * dx + dy * dy) / 10.0);
        double t = nint(r);
        return t < r ? t + 1.0 : t;
    }
    case Metric::GEO: {
        double q1 = std::cos(geo_lon_[i] - geo_lon_[j]);
        double q2 = std::cos(geo_lat_[i] - geo_lat_[j]);
        double q3 = std::cos(geo_lat_[i] + geo_lat_[j]);
        return std::trunc(kGeoRadius * std::acos(0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)) + 1.0);
    }
    }
    return 0.0;
}

double Instance::max_distance(std::span<const int> cities) const {
    double best = 0.0;
    if (cities.empty()) {
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) best = std::max(best, distance(i, j));
    } else {
        for (size_t a = 0; a < cities.size(); ++a)
            for (size_t b = a + 1; b < cities.size(); ++b)
                best = std::max(best, distance(cities[a], cities[b]));
    }
    return best;
}

double Instance::tour_length(std::span<const int> order, bool closed) const {
    if (order.size() < 2) throw std::invalid_argument("tour needs at least 2 cities");
    std::vector<char> seen(static_cast<size_t>(n_), 0);
    for (int c : order) {
        if (c < 0 || c >= n_) throw std::invalid_argument("tour index out of range");
        if (seen[static_cast<size_t>(c)]) throw std::invalid_argument("duplicate city in tour");
        seen[static_cast<size_t>(c)] = 1;
    }
    double total = 0.0;
    for (size_t k = 0; k + 1 < order.size(); ++k) total += distance(order[k], order[k + 1]);
    if (closed) total += distance(order.back(), order.front());
    return total;
}

std::string Instance::to_tsplib() const {
    std::ostringstream out;
    out << "NAME: " << name_ << "\n";
    out << "TYPE: TSP\n";
    out << "DIMENSION: " << n_ << "\n";
    if (metric_ == Metric::REAL_EUC)
        throw std::invalid_argument("REAL_EUC has no TSPLIB representation");
    out << "EDGE_WEIGHT_TYPE: " << metric_name(metric_) << "\n";
    if (metric_ == Metric::EXPLICIT) {
        out << "EDGE_WEIGHT_FORMAT: FULL_MATRIX\n";
        out << "EDGE_WEIGHT_SECTION\n";
        out.precision(17);
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j)
                out << weights_[static_cast<size_t>(i) * static_cast<size_t>(n_) + j]
                    << (j + 1 == n_ ? "" : " ");
            out << "\n";
        }
    } else {
        out << "NODE_COORD_SECTION\n";
        out.precision(17);
        for (int i = 0; i < n_; ++i)
            out << (i + 1) << " " << coords_[i].x << " " << coords_[i].y << "\n";
    }
    out << "EOF\n";
    return out.str();
}

bool is_permutation(std::span<const int> order, int n) {
    if (order.size() != static_cast<size_t>(n)) return false;
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (int c : order) {
        if (c < 0 || c >= n || seen[static_cast<size_t>(c)]) return false;
        seen[static_cast<size_t>(c)] = 1;
    }
    return true;
}

double deviation_ratio(double found, double optimal) {
    if (!(optimal > 0.0)) throw std::invalid_argument("optimal length must be positive");
    return found / optimal;
}

void write_tour_file(const std::filesystem::path& file, const std::string& name,
                     std::span<const int> order) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << "NAME: " << name << "\n";
    out << "TYPE: TOUR\n";
    out << "DIMENSION: " << order.size() << "\n";
    out << "TOUR_SECTION\n";
    for (int c : order) out << (c + 1) << "\n";
    out << "-1\nEOF\n";
}

} // namespace limo
