#ifndef GCPOSE_IO_H_
#define GCPOSE_IO_H_

#include "gcpose/types.h"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcpose {

// Malformed input. `line` is 1-based, 0 when the location is not a line.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string &what, int line = 0) : std::runtime_error(what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

// {"cameras":[{"R":[9 numbers, row-major],"t":[3 numbers]}, ...]}
RigCalibration read_rig(std::istream &in);
RigCalibration read_rig_file(const std::string &path);
void write_rig(std::ostream &out, const RigCalibration &rig);

// JSON lines, one {"cam0":i,"cam1":j,"b0":[3],"b1":[3]} per match. Blank lines are skipped.
std::vector<Correspondence> read_correspondences(std::istream &in);
std::vector<Correspondence> read_correspondences_file(const std::string &path);
void write_correspondences(std::ostream &out, const std::vector<Correspondence> &matches);

}  // namespace gcpose

#endif  // GCPOSE_IO_H_
