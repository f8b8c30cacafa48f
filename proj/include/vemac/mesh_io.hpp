// JSON mesh files: {"vertices": [[x,y],...], "cells": [[i0,i1,...],...]}.
#pragma once

#include <string>

#include "vemac/mesh.hpp"

namespace vemac {

// Loads and rebuilds edge connectivity; malformed content throws FormatError,
// unreadable files throw IoError with the path.
PolyMesh load_mesh_json(const std::string& path);

// Writes vertices and cell rings; repeated saves are byte-identical.
void save_mesh_json(const PolyMesh& mesh, const std::string& path);

}  // namespace vemac
