#pragma once

// Persistent format for trained control fields:
//
//   slc-field v1
//   model = <model id>
//   T = <horizon, ns>
//   intervals = <M>
//   channels = <C>
//   channel = <name> <lo> <hi>        (C lines, channel order)
//   seed_train = <uint64>
//   objective = <final ensemble J>
//   converged = <0|1>
//   iterations = <accepted steps>
//   k,<name>,...                       (CSV header)
//   0,<v>,...                          (M rows, k ascending)
//   ...
//   checksum = fnv1a64:<16 hex digits>
//
// Doubles are %.17g, so encode(decode(encode(x))) is byte-identical. The
// checksum covers every byte before its own line; any edit to the file body
// is rejected at load time.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "slc/field.hpp"
#include "slc/io.hpp"

namespace slc {

struct FieldFileData {
    std::string model_id;
    ControlField field;
    std::uint64_t seed_train = 0;
    double objective = 0.0;
    bool converged = false;
    int iterations = 0;
};

inline std::string encode_field_file(const FieldFileData& d) {
    validate_shape(d.field);
    if (d.model_id.empty()) throw std::invalid_argument("field file: empty model id");
    const ControlField& f = d.field;
    std::string s;
    s += "slc-field v1\n";
    s += "model = " + d.model_id + "\n";
    s += "T = " + format_double(f.T) + "\n";
    s += "intervals = " + std::to_string(f.intervals) + "\n";
    s += "channels = " + std::to_string(f.channels()) + "\n";
    for (int c = 0; c < f.channels(); ++c)
        s += "channel = " + f.names[static_cast<std::size_t>(c)] + " " +
             format_double(f.lo[static_cast<std::size_t>(c)]) + " " +
             format_double(f.hi[static_cast<std::size_t>(c)]) + "\n";
    s += "seed_train = " + std::to_string(d.seed_train) + "\n";
    s += "objective = " + format_double(d.objective) + "\n";
    s += "converged = " + std::string(d.converged ? "1" : "0") + "\n";
    s += "iterations = " + std::to_string(d.iterations) + "\n";
    s += "k";
    for (const auto& n : f.names) s += "," + n;
    s += "\n";
    for (int k = 0; k < f.intervals; ++k) {
        s += std::to_string(k);
        for (int c = 0; c < f.channels(); ++c) s += "," + format_double(f.at(c, k));
        s += "\n";
    }
    s += "checksum = fnv1a64:" + to_hex16(fnv1a64(s)) + "\n";
    return s;
}

inline FieldFileData decode_field_file(const std::string& text) {
    const auto lines = split_lines(text);
    if (lines.size() < 2 || lines[0] != "slc-field v1")
        throw IoError("field file: missing 'slc-field v1' signature");

    const std::string& last = lines.back();
    const std::string tag = "checksum = fnv1a64:";
    if (last.rfind(tag, 0) != 0) throw IoError("field file: missing checksum line");
    const std::size_t covered = text.rfind(tag);
    const std::uint64_t stored = [&] {
        const std::string hex = last.substr(tag.size());
        if (hex.size() != 16) throw IoError("field file: malformed checksum");
        char* end = nullptr;
        const unsigned long long v = std::strtoull(hex.c_str(), &end, 16);
        if (end != hex.c_str() + hex.size()) throw IoError("field file: malformed checksum");
        return static_cast<std::uint64_t>(v);
    }();
    if (fnv1a64(text.data(), covered) != stored)
        throw IoError("field file: checksum mismatch (file corrupted)");

    FieldFileData d;
    ControlField& f = d.field;
    int channels = -1;
    std::size_t i = 1;
    bool have_T = false, have_M = false, have_seed = false, have_obj = false, have_conv = false,
         have_iter = false;
    for (; i < lines.size(); ++i) {
        const std::string& ln = lines[i];
        const std::size_t eq = ln.find(" = ");
        if (eq == std::string::npos) break;  // header ends at the CSV column row
        const std::string key = ln.substr(0, eq);
        const std::string val = ln.substr(eq + 3);
        if (key == "model") {
            d.model_id = val;
        } else if (key == "T") {
            f.T = parse_double_text(val, "T");
            have_T = true;
        } else if (key == "intervals") {
            f.intervals = static_cast<int>(parse_int_text(val, "intervals"));
            have_M = true;
        } else if (key == "channels") {
            channels = static_cast<int>(parse_int_text(val, "channels"));
        } else if (key == "channel") {
            const auto parts = split(val, ' ');
            if (parts.size() != 3) throw IoError("field file: bad channel line '" + ln + "'");
            f.names.push_back(parts[0]);
            f.lo.push_back(parse_double_text(parts[1], "channel lower bound"));
            f.hi.push_back(parse_double_text(parts[2], "channel upper bound"));
        } else if (key == "seed_train") {
            d.seed_train = parse_uint64_text(val, "seed_train");
            have_seed = true;
        } else if (key == "objective") {
            d.objective = parse_double_text(val, "objective");
            have_obj = true;
        } else if (key == "converged") {
            if (val != "0" && val != "1") throw IoError("field file: converged must be 0 or 1");
            d.converged = val == "1";
            have_conv = true;
        } else if (key == "iterations") {
            d.iterations = static_cast<int>(parse_int_text(val, "iterations"));
            have_iter = true;
        } else {
            throw IoError("field file: unknown header key '" + key + "'");
        }
    }
    if (d.model_id.empty() || !have_T || !have_M || channels < 1 || !have_seed || !have_obj ||
        !have_conv || !have_iter)
        throw IoError("field file: incomplete header");
    if (static_cast<int>(f.names.size()) != channels)
        throw IoError("field file: channel line count does not match 'channels'");

    if (i >= lines.size()) throw IoError("field file: missing value table");
    std::string expect_cols = "k";
    for (const auto& n : f.names) expect_cols += "," + n;
    if (lines[i] != expect_cols)
        throw IoError("field file: value table header must be '" + expect_cols + "'");
    ++i;

    if (f.intervals < 1) throw IoError("field file: intervals must be >= 1");
    f.values.assign(static_cast<std::size_t>(channels) * f.intervals, 0.0);
    for (int k = 0; k < f.intervals; ++k, ++i) {
        if (i >= lines.size() - 1) throw IoError("field file: truncated value table");
        const auto cells = split(lines[i], ',');
        if (static_cast<int>(cells.size()) != channels + 1)
            throw IoError("field file: wrong column count at row " + std::to_string(k));
        if (parse_int_text(cells[0], "row index") != k)
            throw IoError("field file: row index mismatch at row " + std::to_string(k));
        for (int c = 0; c < channels; ++c)
            f.values[static_cast<std::size_t>(c) * f.intervals + k] =
                parse_double_text(cells[static_cast<std::size_t>(c) + 1], "field value");
    }
    if (i != lines.size() - 1) throw IoError("field file: unexpected lines after value table");

    try {
        validate_shape(f);
    } catch (const std::exception& e) {
        throw IoError(std::string("field file: ") + e.what());
    }
    if (!within_bounds(f)) throw IoError("field file: values outside channel bounds");
    return d;
}

inline void save_field_file(const std::string& path, const FieldFileData& d) {
    write_text_file(path, encode_field_file(d));
}

inline FieldFileData load_field_file(const std::string& path) {
    return decode_field_file(read_text_file(path));
}

}  // namespace slc
