#pragma once

#include <string>
#include <vector>

namespace textanchor {

/// One recognized word with absolute times in seconds.
struct TimedWord {
    std::string word;
    double start_s = 0.0;
    double end_s = 0.0;
};

/// Automatic transcript of one recording. Words are sorted by start time.
struct TimedTranscript {
    std::string recording_id;
    std::string audio_path;
    std::vector<TimedWord> words;
};

}  // namespace textanchor
