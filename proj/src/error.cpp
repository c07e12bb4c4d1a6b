#include "storyframes/error.hpp"

namespace storyframes {

ErrStage stage_of(Errc c) {
    switch (c) {
        case Errc::ok:
            return ErrStage::none;
        case Errc::invalid_args:
        case Errc::invalid_spec:
        case Errc::bad_dims:
        case Errc::dim_mismatch:
        case Errc::nothing_editable:
        case Errc::out_of_bounds:
        case Errc::empty_object:
            return ErrStage::args;
        case Errc::file_unreadable:
        case Errc::fetch_failed:
        case Errc::empty_source:
        case Errc::empty_after_cleaning:
            return ErrStage::ingest;
        case Errc::client_error:
        case Errc::unknown_text:
            return ErrStage::translate;
        case Errc::auth_error:
        case Errc::rate_limited:
        case Errc::provider_error:
        case Errc::network_error:
        case Errc::no_object:
            return ErrStage::backend;
        case Errc::io_error:
            return ErrStage::io;
    }
    return ErrStage::args;
}

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::ok: return "Ok";
        case Errc::invalid_args: return "InvalidArgs";
        case Errc::invalid_spec: return "InvalidSpec";
        case Errc::bad_dims: return "BadDims";
        case Errc::dim_mismatch: return "DimMismatch";
        case Errc::nothing_editable: return "NothingEditable";
        case Errc::out_of_bounds: return "OutOfBounds";
        case Errc::empty_object: return "EmptyObject";
        case Errc::file_unreadable: return "FileUnreadable";
        case Errc::fetch_failed: return "FetchFailed";
        case Errc::empty_source: return "EmptySource";
        case Errc::empty_after_cleaning: return "EmptyAfterCleaning";
        case Errc::client_error: return "ClientError";
        case Errc::unknown_text: return "UnknownText";
        case Errc::auth_error: return "AuthError";
        case Errc::rate_limited: return "RateLimited";
        case Errc::provider_error: return "ProviderError";
        case Errc::network_error: return "NetworkError";
        case Errc::no_object: return "NoObject";
        case Errc::io_error: return "IoError";
    }
    return "Unknown";
}

}  // namespace storyframes
