#include "tomedia/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "tomedia/errors.hpp"

namespace tomedia {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  return fmt::format("{:.17g}", v);
}

namespace {

void write_point(std::ostream& out, const Point3& p) {
  out << format_double(p.x()) << ',' << format_double(p.y()) << ',' << format_double(p.z());
}

void write_upper(std::ostream& out, const Mat3& m) {
  for (int r = 0; r < 3; ++r) {
    for (int c = r; c < 3; ++c) out << ',' << format_double(m(r, c));
  }
}

}  // namespace

void write_tensor_csv(std::ostream& out, const CoordinateMap& map, const Grid& grid,
                      double epsPrime, double muPrime) {
  out << "x,y,z,exx,exy,exz,eyy,eyz,ezz,mxx,mxy,mxz,myy,myz,mzz,handedness\n";
  const Mat3 nanTensor = Mat3::Constant(std::nan(""));
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const Point3 p = grid.point(idx);
    write_point(out, p);
    try {
      const MaterialTensors t = material_tensors(jacobian(map, p), epsPrime, muPrime);
      write_upper(out, t.eps);
      write_upper(out, t.mu);
      out << (t.handedness == Handedness::Left ? ",left\n" : ",right\n");
    } catch (const UndefinedImage&) {
      write_upper(out, nanTensor);
      write_upper(out, nanTensor);
      out << ",undefined\n";
    } catch (const InterfaceError&) {
      write_upper(out, nanTensor);
      write_upper(out, nanTensor);
      out << ",interface\n";
    }
  }
}

void write_scalar_csv(std::ostream& out, const ComplexScalarField& field) {
  out << "x,y,z,re,im\n";
  for (std::size_t idx = 0; idx < field.grid.size(); ++idx) {
    write_point(out, field.grid.point(idx));
    out << ',' << format_double(field.values[idx].real()) << ','
        << format_double(field.values[idx].imag()) << '\n';
  }
}

void write_vector_csv(std::ostream& out, const ComplexVectorField& field) {
  out << "x,y,z,reAx,imAx,reAy,imAy,reAz,imAz,mask\n";
  for (std::size_t idx = 0; idx < field.grid.size(); ++idx) {
    write_point(out, field.grid.point(idx));
    for (int a = 0; a < 3; ++a) {
      out << ',' << format_double(field.values[idx][a].real()) << ','
          << format_double(field.values[idx][a].imag());
    }
    out << ',' << static_cast<int>(field.mask.empty() ? 0 : field.mask[idx]) << '\n';
  }
}

void write_file(const std::string& path, const std::string& bytes) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw Error("cannot create directory for " + path + ": " + ec.message());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

}  // namespace tomedia
