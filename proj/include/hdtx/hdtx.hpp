#pragma once

#include "hdtx/builder.hpp"
#include "hdtx/cat.hpp"
#include "hdtx/dictionary.hpp"
#include "hdtx/document.hpp"
#include "hdtx/generator.hpp"
#include "hdtx/header.hpp"
#include "hdtx/merge.hpp"
#include "hdtx/ntriples.hpp"
#include "hdtx/section.hpp"
#include "hdtx/term.hpp"
#include "hdtx/triples.hpp"
