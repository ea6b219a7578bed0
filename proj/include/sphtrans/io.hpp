#ifndef SPHTRANS_IO_HPP
#define SPHTRANS_IO_HPP

#include <string>
#include <vector>

#include <Eigen/Core>

#include "sphtrans/errors.hpp"
#include "sphtrans/geometry.hpp"
#include "sphtrans/solver.hpp"

namespace sphtrans {

/// File could not be opened, written or closed.
class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class SnapshotFormat { Csv, VtkLegacy };

SnapshotFormat snapshot_format_from_string(const std::string& name);

/// Header `lambda,theta,u`, one row per node, 17 significant digits.
void write_snapshot_csv(const PointSet& ps, const Eigen::VectorXd& u, const std::string& path);

/// Legacy ASCII VTK, POLYDATA with one vertex per node and point scalars `u`.
void write_snapshot_vtk(const PointSet& ps, const Eigen::VectorXd& u, const std::string& path,
                        const std::string& title = "sphtrans snapshot");

void emit_snapshot(const PointSet& ps, const Eigen::VectorXd& u, SnapshotFormat format,
                   const std::string& path);

struct SnapshotTable {
    std::vector<double> lambda;
    std::vector<double> theta;
    std::vector<double> u;
};

SnapshotTable read_snapshot_csv(const std::string& path);

/// `key: value` lines, one per scalar field of the report.
std::string report_text(const RunReport& report);
/// Single-line JSON object; per-step statistics under "step_stats".
std::string report_json(const RunReport& report, bool include_steps = true);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace sphtrans

#endif  // SPHTRANS_IO_HPP
