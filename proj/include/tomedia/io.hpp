#pragma once

// CSV export of tensor and field samples. Numbers use 17 significant digits
// and rows follow the grid order (x fastest).

#include <ostream>
#include <string>

#include "tomedia/coordmaps.hpp"
#include "tomedia/fields.hpp"

namespace tomedia {

// Header x,y,z,exx,exy,exz,eyy,eyz,ezz,mxx,mxy,mxz,myy,myz,mzz,handedness.
// Points without an image carry nan tensors and handedness "undefined";
// points on a kink carry nan and "interface".
void write_tensor_csv(std::ostream& out, const CoordinateMap& map, const Grid& grid,
                      double epsPrime, double muPrime);

// x,y,z,re,im
void write_scalar_csv(std::ostream& out, const ComplexScalarField& field);

// x,y,z,reAx,imAx,reAy,imAy,reAz,imAz,mask
void write_vector_csv(std::ostream& out, const ComplexVectorField& field);

// Writes `bytes` to `path`, creating parent directories. Throws Error naming
// the path on failure.
void write_file(const std::string& path, const std::string& bytes);

std::string format_double(double v);

}  // namespace tomedia
