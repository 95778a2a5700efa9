#include "stsne/streamgen.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "stsne/errors.hpp"

namespace stsne {
namespace {

// Cholesky factor of a 3x3 SPD matrix; throws on a non-positive pivot.
std::array<std::array<double, 3>, 3> cholesky3(
    const std::array<std::array<double, 3>, 3>& c) {
    std::array<std::array<double, 3>, 3> l{};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = c[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (s <= 0.0) throw ConfigError("covariance matrix is not SPD");
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    return l;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

SyntheticDriftStream::SyntheticDriftStream(const std::array<DriftStructureSpec, 3>& specs,
                                           std::uint64_t total, std::uint64_t seed,
                                           std::uint64_t tick_every)
    : total_(total), tick_every_(tick_every == 0 ? 1 : tick_every), rng_(seed) {
    for (std::size_t i = 0; i < 3; ++i) {
        structures_[i].spec = specs[i];
        structures_[i].mean = specs[i].mean;
        structures_[i].scale = 1.0;
        structures_[i].chol = cholesky3(specs[i].covariance);
        if (specs[i].scale_rate <= 0.0)
            throw ConfigError("SyntheticDriftStream: scale rate must be positive");
    }
}

std::array<DriftStructureSpec, 3> SyntheticDriftStream::default_specs() {
    std::array<DriftStructureSpec, 3> specs;
    specs[0].mean = {-2.5, 0.0, 0.0};
    specs[0].velocity = {0.05, 0.0, 0.0};
    specs[1].mean = {2.5, 0.0, 0.0};
    specs[1].velocity = {-0.05, 0.0, 0.0};
    specs[2].mean = {0.0, 4.0, 0.0};
    for (auto& s : specs) {
        s.scale_rate = 1.002;
        s.oscillate = true;
    }
    return specs;
}

void SyntheticDriftStream::tick() {
    ++ticks_;
    for (auto& st : structures_) {
        for (std::size_t a = 0; a < 3; ++a) st.mean[a] += st.spec.velocity[a];
        if (st.spec.oscillate) {
            st.scale *= (ticks_ % 2 == 1) ? st.spec.scale_rate : 1.0 / st.spec.scale_rate;
        } else {
            st.scale *= st.spec.scale_rate;
        }
    }
}

std::optional<StreamItem> SyntheticDriftStream::next() {
    if (emitted_ >= total_) return std::nullopt;
    while (ticks_ < emitted_ / tick_every_) tick();

    const std::size_t s = emitted_ % 3;
    auto& st = structures_[s];
    const double sd = std::sqrt(st.scale);
    std::array<double, 3> z{rng_.gaussian(), rng_.gaussian(), rng_.gaussian()};
    StreamItem item;
    item.point.id = next_id_++;
    item.point.coords.resize(3);
    for (std::size_t i = 0; i < 3; ++i) {
        double v = st.mean[i];
        for (std::size_t k = 0; k <= i; ++k) v += sd * st.chol[i][k] * z[k];
        item.point.coords[i] = v;
    }
    item.label = static_cast<int>(s);
    ++emitted_;
    return item;
}

BlobStream::BlobStream(std::size_t k, std::uint64_t n_per_cluster, double separation,
                       std::size_t dim, std::uint64_t seed, double sigma)
    : n_per_cluster_(n_per_cluster), dim_(dim), sigma_(sigma), rng_(seed) {
    if (k < 1) throw ConfigError("BlobStream: need at least 1 cluster");
    if (dim < 1) throw ConfigError("BlobStream: need at least 1 dimension");
    if (separation <= 0.0) throw ConfigError("BlobStream: separation must be positive");
    means_.resize(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < k; ++i) means_[i][0] = static_cast<double>(i) * separation;
}

std::optional<StreamItem> BlobStream::next() {
    if (emitted_ >= n_per_cluster_ * means_.size()) return std::nullopt;
    const std::size_t c = emitted_ % means_.size();
    StreamItem item;
    item.point.id = next_id_++;
    item.point.coords.resize(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        item.point.coords[i] = means_[c][i] + sigma_ * rng_.gaussian();
    item.label = static_cast<int>(c);
    ++emitted_;
    return item;
}

FileStream::FileStream(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw DataError("FileStream: cannot open " + path);
}

std::optional<StreamItem> FileStream::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (trim(line).empty()) continue;

        std::vector<std::string_view> fields;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }

        if (!header_checked_) {
            header_checked_ = true;
            bool numeric = true;
            double tmp;
            for (auto f : fields) numeric = numeric && parse_double(f, tmp);
            if (!numeric) {
                has_label_ = trim(fields.back()) == "label";
                dim_ = fields.size() - (has_label_ ? 1 : 0);
                if (dim_ == 0)
                    throw DataError("FileStream: no coordinate columns in header of " + path_);
                continue;  // header row consumed
            }
        }

        const std::size_t want = dim_ == 0 ? fields.size() : dim_ + (has_label_ ? 1 : 0);
        if (fields.size() != want)
            throw DataError("FileStream: ragged row at " + path_ + ":" +
                            std::to_string(line_no_));
        if (dim_ == 0) dim_ = fields.size();

        StreamItem item;
        item.point.id = next_id_++;
        item.point.coords.resize(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            if (!parse_double(fields[i], item.point.coords[i]))
                throw DataError("FileStream: non-numeric field at " + path_ + ":" +
                                std::to_string(line_no_));
        }
        if (has_label_) {
            double lab;
            if (!parse_double(fields.back(), lab) ||
                lab != std::floor(lab))
                throw DataError("FileStream: bad label at " + path_ + ":" +
                                std::to_string(line_no_));
            item.label = static_cast<int>(lab);
        }
        return item;
    }
    return std::nullopt;
}

}  // namespace stsne
