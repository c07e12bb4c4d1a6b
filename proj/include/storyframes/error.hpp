#pragma once

#include <stdexcept>
#include <string>

namespace storyframes {

enum class Errc {
    ok = 0,
    // argument / parameter problems
    invalid_args,
    invalid_spec,
    bad_dims,
    dim_mismatch,
    nothing_editable,
    out_of_bounds,
    empty_object,
    // text acquisition
    file_unreadable,
    fetch_failed,
    empty_source,
    empty_after_cleaning,
    // translation
    client_error,
    unknown_text,
    // generation backend
    auth_error,
    rate_limited,
    provider_error,
    network_error,
    no_object,
    // filesystem
    io_error,
};

// Failure stage, doubles as the process exit code.
enum class ErrStage {
    none = 0,
    args = 2,
    ingest = 3,
    translate = 4,
    backend = 5,
    io = 6,
};

ErrStage stage_of(Errc c);
const char* errc_name(Errc c);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Errc code() const { return code_; }
    ErrStage stage() const { return stage_of(code_); }

  private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace storyframes
