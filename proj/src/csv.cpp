#include "delaysync/csv.hpp"

#include <filesystem>

#include <fmt/format.h>

namespace dsync {

CsvWriter::CsvWriter(const std::string& path, const std::string& header) : path_(path) {
    file_ = std::fopen(path.c_str(), "wb");
    if (!file_) throw InvalidInput("cannot write '" + path + "'");
    std::fputs(header.c_str(), file_);
    std::fputc('\n', file_);
}

CsvWriter::~CsvWriter() {
    if (file_) std::fclose(file_);
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(fmt::format("{}", v)); }

CsvWriter& CsvWriter::cell(unsigned long long v) { return cell(fmt::format("{}", v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (!row_.empty()) row_ += ',';
    row_ += v;
    return *this;
}

void CsvWriter::end_row() {
    row_ += '\n';
    if (std::fputs(row_.c_str(), file_) < 0) throw InvalidInput("write failed on '" + path_ + "'");
    row_.clear();
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InvalidInput("cannot create output directory '" + dir + "': " + ec.message());
}

void write_branches(const std::string& path, const std::vector<SpectrumBranch>& branches) {
    CsvWriter csv(path, "branch,omega,gamma,re_g,im_g");
    for (const auto& b : branches) {
        for (std::size_t i = 0; i < b.omega.size(); ++i) {
            csv.cell(b.index).cell(b.omega[i]).cell(b.gamma[i]).cell(b.g[i].real()).cell(b.g[i].imag());
            csv.end_row();
        }
    }
}

void write_roots(const std::string& path, const ExactSpectrum& spectrum) {
    CsvWriter csv(path, "re_lambda,im_lambda,residual,family");
    for (const auto& r : spectrum.roots) {
        csv.cell(r.lambda.real()).cell(r.lambda.imag()).cell(r.residual).cell(to_string(r.family));
        csv.end_row();
    }
}

void write_map(const std::string& path, const std::vector<MapCell>& cells) {
    CsvWriter csv(path, "sigma,tau,max_re_lambda,degenerate_flag");
    for (const auto& c : cells) {
        csv.cell(c.sigma).cell(c.tau).cell(c.max_re).cell(c.degenerate ? 1 : 0);
        csv.end_row();
    }
}

void write_map_audit(const std::string& path, const std::vector<MapCell>& cells) {
    CsvWriter csv(path, "sigma,tau,root_count");
    for (const auto& c : cells) {
        csv.cell(c.sigma).cell(c.tau).cell(c.root_count);
        csv.end_row();
    }
}

void write_trajectory(const std::string& path, const Trajectory& traj, long stride) {
    if (stride < 1) throw InvalidInput("trajectory stride must be >= 1");
    CsvWriter csv(path, "t,node,component,value");
    for (Eigen::Index k = 0; k < traj.samples(); k += stride) {
        for (int j = 0; j < traj.n; ++j) {
            for (int c = 0; c < traj.q; ++c) {
                csv.cell(traj.t[k]).cell(j).cell(c).cell(traj.states(k, static_cast<Eigen::Index>(j) * traj.q + c));
                csv.end_row();
            }
        }
    }
}

void write_series(const std::string& path, const std::string& header, const std::vector<double>& t, const std::vector<double>& v) {
    CsvWriter csv(path, header);
    for (std::size_t k = 0; k < t.size(); ++k) {
        csv.cell(t[k]).cell(v[k]);
        csv.end_row();
    }
}

}  // namespace dsync
