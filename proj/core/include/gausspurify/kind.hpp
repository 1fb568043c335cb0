#pragma once

#include <string_view>

namespace gausspurify {

/// Which Gaussian channel family: beamsplitter loss (0 < k < 1) or
/// phase-insensitive parametric amplifier (k > 1).
enum class ChannelKind { attenuate, amplify };

constexpr std::string_view to_string(ChannelKind kind) noexcept {
    return kind == ChannelKind::attenuate ? "att" : "amp";
}

/// Accepts "att"/"attenuate" and "amp"/"amplify"; throws DomainError otherwise.
ChannelKind parse_channel_kind(std::string_view text);

}  // namespace gausspurify
