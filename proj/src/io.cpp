#include "bpm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <string_view>

namespace bpm {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(s.substr(start)));
            return out;
        }
        out.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
}

template <typename T>
T parse_number(std::string_view field, const std::string& path, int line) {
    T value{};
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError(path, line, "cannot parse number '" + std::string(field) + "'");
    return value;
}

// Calls fn(line_number, fields) for every data row; blank and '#' lines skip.
template <typename Fn>
void for_each_row(const std::string& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view s = trim(raw);
        if (s.empty() || s.front() == '#') continue;
        fn(line, s);
    }
}

void check_arity(std::size_t n, std::size_t lo, std::size_t hi, const std::string& path,
                 int line) {
    if (n < lo || n > hi)
        throw ParseError(path, line,
                         "expected " + std::to_string(lo) + ".." + std::to_string(hi) +
                             " comma-separated fields, got " + std::to_string(n));
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    return out;
}

void write_row(std::ofstream& out, int frame, int id, const BoundingBox& b, double conf) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%d,%.4f,%.4f,%.4f,%.4f,%.4f,-1,-1,-1\n", frame, id,
                  b.x, b.y, b.w, b.h, conf);
    out << buf;
}

}  // namespace

ParseError::ParseError(const std::string& path, int line, const std::string& what)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
      line_number(line) {}

std::map<int, std::vector<Detection>> read_detections(const std::string& path) {
    std::map<int, std::vector<Detection>> out;
    for_each_row(path, [&](int line, std::string_view row) {
        const auto f = split(row, ',');
        check_arity(f.size(), 7, 10, path, line);
        const int frame = parse_number<int>(f[0], path, line);
        parse_number<int>(f[1], path, line);  // id, -1 on detections
        BoundingBox box{parse_number<double>(f[2], path, line),
                        parse_number<double>(f[3], path, line),
                        parse_number<double>(f[4], path, line),
                        parse_number<double>(f[5], path, line)};
        const double conf = parse_number<double>(f[6], path, line);
        try {
            auto& list = out[frame];
            list.push_back(make_detection(frame, box, conf, std::nullopt,
                                          static_cast<int>(list.size())));
        } catch (const std::invalid_argument& e) {
            throw ParseError(path, line, e.what());
        }
    });
    return out;
}

LabeledSequence read_labeled(const std::string& path) {
    LabeledSequence out;
    for_each_row(path, [&](int line, std::string_view row) {
        const auto f = split(row, ',');
        check_arity(f.size(), 7, 10, path, line);
        const int frame = parse_number<int>(f[0], path, line);
        const int id = parse_number<int>(f[1], path, line);
        BoundingBox box{parse_number<double>(f[2], path, line),
                        parse_number<double>(f[3], path, line),
                        parse_number<double>(f[4], path, line),
                        parse_number<double>(f[5], path, line)};
        if (!box.valid()) throw ParseError(path, line, "degenerate box");
        out[frame].emplace_back(id, box);
    });
    return out;
}

void write_detections(const std::string& path,
                      const std::map<int, std::vector<Detection>>& dets) {
    std::ofstream out = open_out(path);
    for (const auto& [frame, list] : dets)
        for (const auto& d : list) write_row(out, frame, -1, d.box, d.confidence);
}

void write_labeled(const std::string& path, const LabeledSequence& seq) {
    std::ofstream out = open_out(path);
    for (const auto& [frame, list] : seq) {
        auto sorted = list;
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [id, box] : sorted) write_row(out, frame, id, box, 1.0);
    }
}

void write_result(const std::string& path, const TrackingResult& result) {
    write_labeled(path, to_labeled(result));
}

EmbeddingTable read_embeddings(const std::string& path) {
    EmbeddingTable out;
    int dim = -1;
    for_each_row(path, [&](int line, std::string_view row) {
        if (dim < 0) {
            if (row.substr(0, 2) != "d=")
                throw ParseError(path, line, "expected header d=<dim>");
            dim = parse_number<int>(row.substr(2), path, line);
            if (dim < 1) throw ParseError(path, line, "dimension must be positive");
            return;
        }
        const auto f = split(row, ',');
        check_arity(f.size(), 2 + dim, 2 + dim, path, line);
        const int frame = parse_number<int>(f[0], path, line);
        const int source = parse_number<int>(f[1], path, line);
        Eigen::VectorXd v(dim);
        for (int k = 0; k < dim; ++k) v(k) = parse_number<double>(f[2 + k], path, line);
        try {
            out[{frame, source}] = normalized_embedding(v);
        } catch (const std::invalid_argument& e) {
            throw ParseError(path, line, e.what());
        }
    });
    return out;
}

void write_embeddings(const std::string& path,
                      const std::map<int, std::vector<Detection>>& dets) {
    std::ofstream out = open_out(path);
    int dim = 0;
    for (const auto& [frame, list] : dets)
        for (const auto& d : list)
            if (d.embedding) dim = std::max<int>(dim, static_cast<int>(d.embedding->size()));
    if (dim == 0) return;  // nothing to write; readers accept an empty file

    out << "d=" << dim << "\n";
    char buf[64];
    for (const auto& [frame, list] : dets)
        for (const auto& d : list) {
            if (!d.embedding) continue;
            if (d.embedding->size() != dim)
                throw std::runtime_error(path + ": mixed embedding dimensions");
            out << frame << ',' << d.source_index;
            for (int k = 0; k < dim; ++k) {
                std::snprintf(buf, sizeof buf, ",%.6f", (*d.embedding)(k));
                out << buf;
            }
            out << "\n";
        }
}

void attach_embeddings(std::map<int, std::vector<Detection>>& dets,
                       const EmbeddingTable& table) {
    for (auto& [frame, list] : dets)
        for (auto& d : list) {
            const auto it = table.find({frame, d.source_index});
            if (it != table.end()) d.embedding = it->second;
        }
}

ScoreMap read_scores(const std::string& path) {
    ScoreMap out;
    for_each_row(path, [&](int line, std::string_view row) {
        const auto f = split(row, ',');
        check_arity(f.size(), 3, 3, path, line);
        const int frame = parse_number<int>(f[0], path, line);
        const int source = parse_number<int>(f[1], path, line);
        const double score = parse_number<double>(f[2], path, line);
        if (score < 0.0 || score > 1.0)
            throw ParseError(path, line, "score outside [0, 1]");
        out[{frame, source}] = score;
    });
    return out;
}

TrackerConfig load_config(const std::string& path) {
    TrackerConfig cfg;
    for_each_row(path, [&](int line, std::string_view row) {
        const std::size_t hash = row.find('#');
        if (hash != std::string_view::npos) row = trim(row.substr(0, hash));
        if (row.empty()) return;
        const std::size_t eq = row.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(path, line, "expected key = value");
        const std::string_view key = trim(row.substr(0, eq));
        const std::string_view value = trim(row.substr(eq + 1));

        if (key == "lambda_s") {
            cfg.lambda_s = parse_number<double>(value, path, line);
            if (cfg.lambda_s < 0.0) throw ParseError(path, line, "lambda_s must be >= 0");
        } else if (key == "tau_match") {
            cfg.tau_match = parse_number<double>(value, path, line);
        } else if (key == "tau_det") {
            cfg.tau_det = parse_number<double>(value, path, line);
            if (cfg.tau_det < 0.0 || cfg.tau_det > 1.0)
                throw ParseError(path, line, "tau_det must lie in [0, 1]");
        } else if (key == "max_age") {
            cfg.max_age = parse_number<int>(value, path, line);
            if (cfg.max_age < 1) throw ParseError(path, line, "max_age must be >= 1");
        } else if (key == "n_init") {
            cfg.n_init = parse_number<int>(value, path, line);
            if (cfg.n_init < 1) throw ParseError(path, line, "n_init must be >= 1");
        } else if (key == "solver_restarts") {
            cfg.solver_restarts = parse_number<int>(value, path, line);
            if (cfg.solver_restarts < 1)
                throw ParseError(path, line, "solver_restarts must be >= 1");
        } else if (key == "solver_max_iters") {
            cfg.solver_max_iters = parse_number<int>(value, path, line);
            if (cfg.solver_max_iters < 1)
                throw ParseError(path, line, "solver_max_iters must be >= 1");
        } else if (key == "rng_seed") {
            cfg.rng_seed = parse_number<std::uint64_t>(value, path, line);
        } else {
            throw ParseError(path, line, "unknown key '" + std::string(key) + "'");
        }
    });
    return cfg;
}

}  // namespace bpm
