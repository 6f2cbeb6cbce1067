#pragma once

#include <string>
#include <vector>

#include "field.hpp"
#include "jump.hpp"

namespace levyfield {

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);
void ensure_directory(const std::string& dir);

// `<stem>.csv` with columns t_1..t_d,value and a `<stem>.json` sidecar.
void write_sample(const std::string& csv_path, const FieldSample& sample);
FieldSample read_sample(const std::string& csv_path);

// Atom CSV (band,rho,s_1..s_d,x) and its JSON sidecar; `triple_fingerprint`
// ties the atoms to the configuration that produced them.
void write_atoms(const std::string& csv_path, const AtomSet& atoms, const std::string& triple_fingerprint);
AtomSet read_atoms(const std::string& csv_path, std::string* triple_fingerprint = nullptr);

std::string sidecar_path(const std::string& csv_path);

}  // namespace levyfield
