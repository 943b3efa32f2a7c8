#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "delaysync/dde_sim.hpp"
#include "delaysync/sl_model.hpp"
#include "delaysync/spectrum.hpp"

namespace dsync {

/// Comma-separated output with shortest round-trip formatting of doubles,
/// so reruns produce byte-identical files.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(unsigned long long v);
    CsvWriter& cell(const std::string& v);
    CsvWriter& cell(const char* v) { return cell(std::string(v)); }
    void end_row();

private:
    std::FILE* file_ = nullptr;
    std::string path_;
    std::string row_;
};

/// Shortest representation that reads back to the same double.
std::string format_double(double v);

void ensure_directory(const std::string& dir);

void write_branches(const std::string& path, const std::vector<SpectrumBranch>& branches);
void write_roots(const std::string& path, const ExactSpectrum& spectrum);
void write_map(const std::string& path, const std::vector<MapCell>& cells);
void write_map_audit(const std::string& path, const std::vector<MapCell>& cells);
void write_trajectory(const std::string& path, const Trajectory& traj, long stride);
void write_series(const std::string& path, const std::string& header, const std::vector<double>& t, const std::vector<double>& v);

}  // namespace dsync
